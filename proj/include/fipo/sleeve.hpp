#pragma once

#include <stdexcept>
#include <string>

#include "fipo/rating.hpp"

namespace fipo {

/// One investable asset class, treated as a single stylised bullet bond.
struct Sleeve {
  std::string name;
  std::string ticker;
  double maturity = 0.0;       // T, years
  double coupon = 0.0;         // c, annual fraction
  int frequency = 2;           // m
  Rating rating;
  double yield = 0.0;          // y, per annum
  double spread = 0.0;         // s, over the riskfree curve
  double dur_ir = 0.0;         // interest-rate duration D^ir
  double dur_cr = 0.0;         // credit duration D^cr
  bool floating = false;       // LIBOR-based: no interest rate risk
  bool high_yield = false;
  bool emerging = false;
  bool structured = false;
  bool financial = false;
  double max_weight = 1.0;     // allocation limit u-bar
  double stress_spread = 0.0;  // z*, stress spread level for CSL

  double riskfree_yield() const { return yield - spread; }

  void validate() const {
    if (name.empty()) throw std::invalid_argument("Sleeve: empty name");
    if (!(maturity > 0.0))
      throw std::invalid_argument("Sleeve " + name + ": maturity must be positive");
    if (frequency < 1)
      throw std::invalid_argument("Sleeve " + name + ": frequency must be >= 1");
    if (dur_ir < 0.0 || dur_cr < 0.0)
      throw std::invalid_argument("Sleeve " + name + ": durations must be >= 0");
    if (floating && dur_ir != 0.0)
      throw std::invalid_argument("Sleeve " + name + ": floating sleeves have zero D^ir");
    if (max_weight < 0.0 || max_weight > 1.0)
      throw std::invalid_argument("Sleeve " + name + ": allocation limit outside [0,1]");
    if (spread < 0.0)
      throw std::invalid_argument("Sleeve " + name + ": spread must be >= 0");
    if (spread > 0.0 && !(stress_spread > 0.0))
      throw std::invalid_argument("Sleeve " + name + ": credit sleeve needs z* > 0");
  }
};

}  // namespace fipo
