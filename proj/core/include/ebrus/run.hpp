#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "ebrus/config.hpp"
#include "ebrus/report.hpp"

namespace ebrus {

/// Commands understood by run().
const std::vector<std::string>& commands();

struct RunResult {
  int exit_status = 0;
  Report report;
  std::vector<std::string> files;  ///< artifacts written, in order
};

/// Executes one command; artifacts go to cfg.out_dir, a human-readable
/// summary to `log`. Exit status is nonzero when a verdict fails.
RunResult run(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// Worker count: BRUSSELATOR_THREADS if set (>= 1), else the hardware count.
int thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by a job is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Generator for ensemble member `index` under `seed`.
std::mt19937_64 run_rng(std::uint64_t seed, std::size_t index);

/// |g0| = radius * U(0, 1]; coefficients N(0, 1) |j|^{-2} per component,
/// rescaled to that norm.
ModalState random_initial(const SineBasis& basis, double radius, std::mt19937_64& rng);

/// Initial data of ensemble member `index` as described by cfg.initial.
ModalState make_initial(const RunConfig& cfg, const SineBasis& basis, std::size_t index);

}  // namespace ebrus
