#include "ebrus/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ebrus/error.hpp"

namespace ebrus {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::array<double, 10> columns(const NormReport& r) {
  return {r.time,    r.v2z2(),  r.y2xi2(), r.p2theta2(),   r.g2(),
          r.l4_vz(), r.l6_vz(), r.h1_uw(), r.h1_vzphipsi(), r.sup};
}

constexpr char kMagic[8] = {'E', 'B', 'R', 'S', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::string& buf, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  buf.append(b.data(), b.size());
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::string& path) : d_(data), path_(path) {}

  template <class T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > d_.size()) {
      throw Error("shell", "checkpoint '" + path_ + "' is truncated (reading " + what + ")");
    }
    std::array<char, sizeof(T)> b;
    std::memcpy(b.data(), d_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
  }

  std::size_t remaining() const { return d_.size() - pos_; }

 private:
  const std::string& d_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string describe(const DomainSpec& d, int modes) {
  std::ostringstream o;
  o << "(n=" << d.dim << ", M=" << modes << ", L=";
  for (int i = 0; i < d.dim; ++i) o << (i ? "x" : "") << g17(d.lengths[i]);
  o << ")";
  return o.str();
}

}  // namespace

std::string trajectory_csv(const std::vector<NormReport>& samples) {
  std::string out = kTrajectoryCsvHeader;
  out += '\n';
  for (const auto& s : samples) {
    const auto c = columns(s);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ',';
      out += g17(c[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("shell", "cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw Error("shell", "write to '" + path + "' failed");
}

void write_trajectory_csv(const std::vector<NormReport>& samples, const std::string& path) {
  write_text(path, trajectory_csv(samples));
}

std::string trajectory_svg(const std::vector<NormReport>& samples,
                           const std::vector<BoundVerdict>& verdicts) {
  static const char* names[] = {"norm_v2z2", "norm_y2xi2", "norm_p2th2", "norm_g2", "l4_vz",
                                "l6_vz",     "h1_uw",      "h1_vzphpsi", "supnorm"};
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  const double W = 900, H = 520, left = 70, right = 170, top = 20, bottom = 40;
  const double pw = W - left - right, ph = H - top - bottom;

  double t0 = 0, t1 = 1, lo = 1e300, hi = -1e300;
  if (!samples.empty()) {
    t0 = samples.front().time;
    t1 = std::max(samples.back().time, t0 + 1e-12);
  }
  auto consider = [&](double v) {
    if (v > 0 && std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (const auto& s : samples) {
    const auto c = columns(s);
    for (std::size_t i = 1; i < c.size(); ++i) consider(c[i]);
  }
  for (const auto& v : verdicts) {
    if (v.bound.representable()) consider(v.bound.x());
  }
  if (!(lo <= hi)) {
    lo = 1e-3;
    hi = 1.0;
  }
  const double llo = std::floor(std::log10(lo)), lhi = std::ceil(std::log10(hi) + 1e-12);
  const double span = std::max(lhi - llo, 1.0);
  auto X = [&](double t) { return left + pw * (t - t0) / (t1 - t0); };
  auto Y = [&](double v) {
    const double l = v > 0 ? std::log10(v) : llo;
    return top + ph * (1.0 - (std::clamp(l, llo, llo + span) - llo) / span);
  };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (int e = static_cast<int>(llo); e <= static_cast<int>(llo + span); ++e) {
    const double y = Y(std::pow(10.0, e));
    o << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << e
      << "</text>\n";
  }
  o << "<text x=\"" << left << "\" y=\"" << H - 12 << "\">t = " << t0 << "</text>\n"
    << "<text x=\"" << left + pw << "\" y=\"" << H - 12 << "\" text-anchor=\"end\">t = " << t1
    << "</text>\n";
  for (int k = 0; k < 9; ++k) {
    o << "<polyline class=\"observable\" data-name=\"" << names[k]
      << "\" fill=\"none\" stroke=\"" << colors[k] << "\" points=\"";
    for (const auto& s : samples) {
      const auto c = columns(s);
      o << X(s.time) << "," << Y(c[k + 1]) << " ";
    }
    o << "\"/>\n"
      << "<text x=\"" << left + pw + 8 << "\" y=\"" << top + 14 * (k + 1) << "\" fill=\""
      << colors[k] << "\">" << names[k] << "</text>\n";
  }
  int row = 0;
  for (const auto& v : verdicts) {
    const double y = v.bound.representable() ? Y(v.bound.x()) : top;
    o << "<line class=\"bound\" data-name=\"" << v.name << "\" x1=\"" << left << "\" x2=\""
      << left + pw << "\" y1=\"" << y << "\" y2=\"" << y
      << "\" stroke=\"#444\" stroke-dasharray=\"4,3\"/>\n"
      << "<text x=\"" << left + pw + 8 << "\" y=\"" << top + 14 * (11 + row++)
      << "\" fill=\"#444\">" << v.name << " = " << v.bound.str(4) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---- checkpoints ---------------------------------------------------------------

void checkpoint_save(const ModalState& ms, const SineBasis& basis, const std::string& path) {
  if (ms.modes() != basis.mode_count()) throw Error("shell", "checkpoint: state/basis mismatch");
  for (double x : ms.coef) {
    if (!std::isfinite(x)) throw Error("shell", "checkpoint: refusing to save a non-finite state");
  }
  std::string buf(kMagic, sizeof kMagic);
  put<std::uint32_t>(buf, kCheckpointVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(basis.dim()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(basis.modes_per_axis()));
  put<std::uint32_t>(buf, 0);
  for (double L : basis.domain().lengths) put<double>(buf, L);
  put<double>(buf, ms.time);
  put<std::uint64_t>(buf, ms.coef.size());
  for (double x : ms.coef) put<double>(buf, x);
  write_text(path, buf);
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("shell", "cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string data = ss.str();
  if (data.size() < sizeof kMagic || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
    throw Error("shell", "'" + path + "' is not a checkpoint (bad magic)");
  }
  ByteReader r(data, path);
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.get<char>("magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw Error("shell", "checkpoint '" + path + "' has version " + std::to_string(version) +
                             ", expected " + std::to_string(kCheckpointVersion));
  }
  Checkpoint cp;
  cp.domain.dim = static_cast<int>(r.get<std::uint32_t>("dim"));
  cp.modes = static_cast<int>(r.get<std::uint32_t>("modes"));
  r.get<std::uint32_t>("reserved");
  for (double& L : cp.domain.lengths) L = r.get<double>("lengths");
  const double time = r.get<double>("time");
  const auto count = r.get<std::uint64_t>("count");
  try {
    cp.domain.validate();
  } catch (const Error& e) {
    throw Error("shell", "checkpoint '" + path + "': " + e.what());
  }
  std::uint64_t expect = kComponents;
  for (int i = 0; i < cp.domain.dim; ++i) expect *= static_cast<std::uint64_t>(cp.modes);
  if (cp.modes < 1 || count != expect) {
    throw Error("shell", "checkpoint '" + path + "': coefficient count " + std::to_string(count) +
                             " does not match " + describe(cp.domain, cp.modes));
  }
  if (r.remaining() != count * sizeof(double)) {
    throw Error("shell", "checkpoint '" + path + "' is truncated or has trailing bytes (" +
                             std::to_string(r.remaining()) + " of " +
                             std::to_string(count * sizeof(double)) + " coefficient bytes)");
  }
  ModalState ms;
  ms.coef.resize(count);
  for (double& x : ms.coef) x = r.get<double>("coefficients");
  ms.time = time;
  cp.state = std::move(ms);
  return cp;
}

ModalState checkpoint_load(const std::string& path, const SineBasis& basis) {
  Checkpoint cp = checkpoint_load(path);
  bool same = cp.domain.dim == basis.dim() && cp.modes == basis.modes_per_axis();
  for (int i = 0; same && i < cp.domain.dim; ++i) {
    same = cp.domain.lengths[i] == basis.domain().lengths[i];
  }
  if (!same) {
    throw Error("shell", "checkpoint '" + path + "' is for " + describe(cp.domain, cp.modes) +
                             " but the run uses " +
                             describe(basis.domain(), basis.modes_per_axis()));
  }
  return std::move(cp.state);
}

}  // namespace ebrus
