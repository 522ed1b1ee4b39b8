#pragma once

#include <string>
#include <vector>

#include "ebrus/bounds.hpp"
#include "ebrus/integrate.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

/// Column order of trajectory CSV files.
inline constexpr const char* kTrajectoryCsvHeader =
    "t,norm_v2z2,norm_y2xi2,norm_p2th2,norm_g2,l4_vz,l6_vz,h1_uw,h1_vzphpsi,supnorm";

/// One row per sample, full double precision (%.17g).
std::string trajectory_csv(const std::vector<NormReport>& samples);
void write_trajectory_csv(const std::vector<NormReport>& samples, const std::string& path);

/// Line plot of the observables against time (log scale on y), one
/// polyline per observable plus one dashed horizontal line per verdict.
/// Bounds that do not fit in a double are pinned to the top edge.
std::string trajectory_svg(const std::vector<NormReport>& samples,
                           const std::vector<BoundVerdict>& verdicts);

void write_text(const std::string& path, const std::string& text);

// ---- checkpoints -------------------------------------------------------------
//
// Little-endian layout:
//   char[8]  magic "EBRSCKPT"
//   u32      format version (1)
//   u32      dim
//   u32      modes per axis
//   u32      reserved (0)
//   f64[3]   lengths
//   f64      time
//   u64      coefficient count (6 * modes^dim)
//   f64[...] coefficients, block-major (u, v, phi, w, z, psi)

struct Checkpoint {
  DomainSpec domain;
  int modes = 0;
  ModalState state;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void checkpoint_save(const ModalState& ms, const SineBasis& basis, const std::string& path);
Checkpoint checkpoint_load(const std::string& path);
/// Loads and checks that (dim, modes, lengths) match `basis`.
ModalState checkpoint_load(const std::string& path, const SineBasis& basis);

}  // namespace ebrus
