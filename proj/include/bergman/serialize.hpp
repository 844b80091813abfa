#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bergman/essential_spectrum.hpp"
#include "bergman/region.hpp"
#include "bergman/spectra.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman {

/// 17 significant digits, so every double round-trips.
std::string format_double(double x);

/// "re+imi" / "re-imi".
std::string format_complex_csv(cplx c);

/// Minimal streaming JSON writer with fixed number formatting and insertion
/// ordered keys, so equal inputs give byte-identical output.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double x);
  JsonWriter& value(std::int64_t x);
  JsonWriter& value(std::uint64_t x);
  JsonWriter& value(int x) { return value(static_cast<std::int64_t>(x)); }
  JsonWriter& value(bool b);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(cplx c);  // [re, im]
  JsonWriter& raw(std::string_view json);

  std::string str() const { return out_ + "\n"; }

 private:
  void separator();
  void write_string(std::string_view s);
  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

void write_grid(JsonWriter& w, const GridSpec& g);
void write_region(JsonWriter& w, const RegionApprox& r);
void write_spectrum_params(JsonWriter& w, const SpectrumParams& p);

/// { "n":..., "kind":"1d"|"2d", "entries":[[re,im],...] } in row-major order.
std::string matrix_to_json(const Eigen::MatrixXcd& m, std::size_t n, std::string_view kind);
/// One line per matrix row, entries as "re+imi".
std::string matrix_to_csv(const Eigen::MatrixXcd& m);

/// { "h":..., "points":[[re,im],...] }
std::string region_to_json(const RegionApprox& r);
/// Header "re,im", then one point per line.
std::string region_to_csv(const RegionApprox& r);

std::string spectrum_to_json(const SpectrumApprox& s);
std::string spectrum_to_csv(const SpectrumApprox& s);

std::string pseudospectrum_to_json(const PseudospectrumGrid& g);
/// First row: re_min,re_max,im_min,im_max,n_re,n_im,epsilon. Then n_im rows
/// of n_re sigma_min values, row p at Im = im_min + p * dy.
std::string pseudospectrum_to_csv(const PseudospectrumGrid& g);

void write_essential_params(JsonWriter& w, const EssentialRecord& rec);
/// { "params":{...}, "union":{region}, "slices_theta1":[{"theta":...,
/// "region":{...}}, ...], "slices_theta2":[...] }
std::string essential_to_json(const EssentialSpectrumResult& r);

std::string verify_to_json(const VerifyReport& r);

}  // namespace bergman
