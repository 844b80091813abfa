#include "bergman/serialize.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace bergman {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("format_double: non-finite value");
  return fmt::format("{:.17g}", x);
}

std::string format_complex_csv(cplx c) {
  const double im = c.imag();
  return fmt::format("{}{}{}i", format_double(c.real()), std::signbit(im) ? "-" : "+", format_double(std::abs(im)));
}

void JsonWriter::separator() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
  separator();
  write_string(k);
  out_ += ':';
  after_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double x) {
  separator();
  out_ += format_double(x);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t x) {
  separator();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
  separator();
  out_ += std::to_string(x);
  return *this;
}

JsonWriter& JsonWriter::value(bool b) {
  separator();
  out_ += b ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  separator();
  write_string(s);
  return *this;
}

void JsonWriter::write_string(std::string_view s) {
  out_ += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      case '\r': out_ += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out_ += fmt::format("\\u{:04x}", static_cast<unsigned>(c));
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

JsonWriter& JsonWriter::value(cplx c) {
  begin_array();
  value(c.real());
  value(c.imag());
  return end_array();
}

JsonWriter& JsonWriter::raw(std::string_view json) {
  separator();
  out_ += json;
  return *this;
}

void write_grid(JsonWriter& w, const GridSpec& g) {
  w.begin_object();
  w.key("re_min").value(g.re_min);
  w.key("re_max").value(g.re_max);
  w.key("im_min").value(g.im_min);
  w.key("im_max").value(g.im_max);
  w.key("n_re").value(static_cast<std::uint64_t>(g.n_re));
  w.key("n_im").value(static_cast<std::uint64_t>(g.n_im));
  w.end_object();
}

void write_region(JsonWriter& w, const RegionApprox& r) {
  w.begin_object();
  w.key("h").value(r.h);
  w.key("points").begin_array();
  for (const auto& p : r.points) w.value(p);
  w.end_array();
  w.end_object();
}

void write_spectrum_params(JsonWriter& w, const SpectrumParams& p) {
  w.begin_object();
  w.key("n").value(static_cast<std::uint64_t>(p.n));
  w.key("eps").value(p.eps);
  w.key("grid");
  write_grid(w, p.grid);
  w.key("m_boundary").value(static_cast<std::uint64_t>(p.m_boundary));
  w.key("q_r").value(static_cast<std::uint64_t>(p.q_r));
  w.key("q_theta").value(static_cast<std::uint64_t>(p.q_theta));
  w.end_object();
}

std::string matrix_to_json(const Eigen::MatrixXcd& m, std::size_t n, std::string_view kind) {
  JsonWriter w;
  w.begin_object();
  w.key("n").value(static_cast<std::uint64_t>(n));
  w.key("kind").value(kind);
  w.key("entries").begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.value(m(i, j));
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string matrix_to_csv(const Eigen::MatrixXcd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_complex_csv(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string region_to_json(const RegionApprox& r) {
  JsonWriter w;
  write_region(w, r);
  return w.str();
}

std::string region_to_csv(const RegionApprox& r) {
  std::string out = "re,im\n";
  for (const auto& p : r.points) out += format_double(p.real()) + "," + format_double(p.imag()) + "\n";
  return out;
}

std::string spectrum_to_json(const SpectrumApprox& s) {
  JsonWriter w;
  w.begin_object();
  w.key("source").value(s.source);
  w.key("tol").value(s.tol);
  w.key("points").begin_array();
  for (const auto& p : s.points) w.value(p);
  w.end_array();
  w.key("residuals").begin_array();
  for (const double r : s.residuals) w.value(r);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string spectrum_to_csv(const SpectrumApprox& s) {
  std::string out = "re,im,residual\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    out += format_double(s.points[i].real()) + "," + format_double(s.points[i].imag()) + "," +
           format_double(s.residuals[i]) + "\n";
  }
  return out;
}

std::string pseudospectrum_to_json(const PseudospectrumGrid& g) {
  JsonWriter w;
  w.begin_object();
  w.key("grid");
  write_grid(w, g.grid);
  w.key("epsilon").value(g.epsilon);
  w.key("values").begin_array();
  for (const double v : g.values) w.value(v);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string pseudospectrum_to_csv(const PseudospectrumGrid& g) {
  const GridSpec& s = g.grid;
  std::string out = fmt::format("{},{},{},{},{},{},{}\n", format_double(s.re_min), format_double(s.re_max),
                                format_double(s.im_min), format_double(s.im_max), s.n_re, s.n_im,
                                format_double(g.epsilon));
  for (std::size_t p = 0; p < s.n_im; ++p) {
    for (std::size_t q = 0; q < s.n_re; ++q) {
      if (q) out += ',';
      out += format_double(g.values[p * s.n_re + q]);
    }
    out += '\n';
  }
  return out;
}

void write_essential_params(JsonWriter& w, const EssentialRecord& rec) {
  w.begin_object();
  w.key("symbol").value(rec.symbol);
  w.key("slice");
  write_spectrum_params(w, rec.requested.slice);
  w.key("grid");
  write_grid(w, rec.grid);
  w.key("auto_grid").value(rec.requested.auto_grid);
  w.key("grid_padding").value(rec.requested.grid_padding);
  w.key("m_theta_requested").value(static_cast<std::uint64_t>(rec.requested.m_theta));
  w.key("m_theta").value(static_cast<std::uint64_t>(rec.m_theta));
  w.key("adaptive").value(rec.requested.adaptive);
  w.key("refined").value(rec.refined);
  w.key("refinement_change").value(rec.refinement_change);
  w.end_object();
}

namespace {

void write_slices(JsonWriter& w, const std::vector<SliceRegion>& slices) {
  w.begin_array();
  for (const auto& s : slices) {
    w.begin_object();
    w.key("theta").value(s.theta);
    w.key("region");
    write_region(w, s.region);
    w.end_object();
  }
  w.end_array();
}

}  // namespace

std::string essential_to_json(const EssentialSpectrumResult& r) {
  JsonWriter w;
  w.begin_object();
  w.key("params");
  write_essential_params(w, r.params);
  w.key("union");
  write_region(w, r.union_region);
  w.key("slices_theta1");
  write_slices(w, r.slices_theta1);
  w.key("slices_theta2");
  write_slices(w, r.slices_theta2);
  w.end_object();
  return w.str();
}

std::string verify_to_json(const VerifyReport& r) {
  JsonWriter w;
  w.begin_object();
  w.key("n2").value(static_cast<std::uint64_t>(r.n2));
  w.key("eps").value(r.eps);
  w.key("probes").begin_array();
  for (const auto& p : r.probes) {
    w.begin_object();
    w.key("lambda").value(p.lambda);
    w.key("inside").value(p.inside);
    w.key("sigma_half").value(p.sigma_half);
    w.key("sigma_full").value(p.sigma_full);
    w.key("status").value(to_string(p.status));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace bergman
