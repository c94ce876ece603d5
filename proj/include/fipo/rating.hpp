#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace fipo {

/// Notched rating scale AAA .. D with two numeric views:
///  - linear score: AAA=1, AA+=2, AA=3, AA-=4, ... (one per notch, D last);
///  - WARF: anchored at the whole letters (AA=20, A=120, BBB=360, BB=1350,
///    B=2720, CCC=6500) and interpolated linearly across notches.
class Rating {
 public:
  static constexpr int kCount = 22;  // AAA .. CCC-, CC, C, D

  Rating() : idx_(0) {}
  explicit Rating(int notch_index) : idx_(notch_index) {
    if (idx_ < 0 || idx_ >= kCount)
      throw std::invalid_argument("Rating: notch index out of range");
  }

  static Rating parse(const std::string& label) {
    for (int i = 0; i < kCount; ++i)
      if (label == labels()[i]) return Rating(i);
    throw std::invalid_argument("Rating: unknown label '" + label + "'");
  }

  const char* label() const { return labels()[idx_]; }
  int index() const { return idx_; }
  int linear_score() const { return idx_ + 1; }
  bool is_default() const { return idx_ == kCount - 1; }
  bool is_investment_grade() const { return idx_ <= 9; }  // BBB- or better

  /// Whole-letter bucket (AA+ -> AA, CCC- -> CCC, CC/C -> CCC), used to look
  /// up notch ratings in letter-grade transition matrices and curve sets.
  Rating whole_letter() const {
    if (is_default()) return *this;
    static constexpr std::array<int, kCount> letter = {
        0,              // AAA
        2,  2,  2,      // AA+ AA AA-
        5,  5,  5,      // A+ A A-
        8,  8,  8,      // BBB+ BBB BBB-
        11, 11, 11,     // BB+ BB BB-
        14, 14, 14,     // B+ B B-
        17, 17, 17,     // CCC+ CCC CCC-
        17, 17,         // CC C
        21};            // D
    return Rating(letter[idx_]);
  }

  double warf() const {
    // anchors on the notch axis
    static constexpr std::array<int, 8> ax = {0, 2, 5, 8, 11, 14, 17, 21};
    static constexpr std::array<double, 8> av = {1,    20,   120,  360,
                                                 1350, 2720, 6500, 10000};
    if (idx_ <= ax.front()) return av.front();
    for (size_t k = 1; k < ax.size(); ++k) {
      if (idx_ <= ax[k]) {
        const double w = static_cast<double>(idx_ - ax[k - 1]) /
                         static_cast<double>(ax[k] - ax[k - 1]);
        return av[k - 1] + w * (av[k] - av[k - 1]);
      }
    }
    return av.back();
  }

  friend bool operator==(const Rating& a, const Rating& b) { return a.idx_ == b.idx_; }
  friend bool operator!=(const Rating& a, const Rating& b) { return a.idx_ != b.idx_; }
  friend bool operator<(const Rating& a, const Rating& b) { return a.idx_ < b.idx_; }

 private:
  static const std::array<const char*, kCount>& labels() {
    static const std::array<const char*, kCount> l = {
        "AAA", "AA+", "AA", "AA-", "A+",   "A",   "A-",  "BBB+",
        "BBB", "BBB-", "BB+", "BB", "BB-", "B+",  "B",   "B-",
        "CCC+", "CCC", "CCC-", "CC", "C",  "D"};
    return l;
  }
  int idx_;
};

}  // namespace fipo
