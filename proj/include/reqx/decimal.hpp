// Copyright 2026 The reqx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reqx {

// Exact base-10 number: mantissa * 10^-scale, kept normalized (no trailing
// fractional zeros, zero is {0,0}). Quantities from the standard's tables
// stay exact through unit conversion; no binary-float drift.
class Decimal {
 public:
  Decimal() = default;

  static Decimal from_parts(std::int64_t mantissa, int scale) {
    if (scale < 0) throw std::invalid_argument("Decimal: negative scale");
    Decimal d;
    d.mantissa_ = mantissa;
    d.scale_ = scale;
    d.normalize();
    return d;
  }

  static Decimal from_int(std::int64_t v) { return from_parts(v, 0); }

  // Canonical form only: [-]digits[.digits]
  static std::optional<Decimal> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      i = 1;
    }
    std::int64_t mantissa = 0;
    int scale = 0;
    bool any_digit = false, in_fraction = false;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c >= '0' && c <= '9') {
        if (mantissa > (INT64_MAX - (c - '0')) / 10) return std::nullopt;
        mantissa = mantissa * 10 + (c - '0');
        if (in_fraction) ++scale;
        any_digit = true;
      } else if (c == '.' && !in_fraction) {
        in_fraction = true;
      } else {
        return std::nullopt;
      }
    }
    if (!any_digit) return std::nullopt;
    return from_parts(negative ? -mantissa : mantissa, scale);
  }

  std::int64_t mantissa() const { return mantissa_; }
  int scale() const { return scale_; }
  bool is_zero() const { return mantissa_ == 0; }
  bool is_negative() const { return mantissa_ < 0; }

  // Exact multiplication by 10^power. Throws on int64 overflow.
  Decimal shifted(int power) const {
    Decimal d = *this;
    if (power >= 0) {
      int up = power;
      // consume stored scale first, then widen the mantissa
      int from_scale = up < d.scale_ ? up : d.scale_;
      d.scale_ -= from_scale;
      up -= from_scale;
      for (; up > 0; --up) {
        if (d.mantissa_ > INT64_MAX / 10 || d.mantissa_ < INT64_MIN / 10)
          throw std::overflow_error("Decimal: shift overflow");
        d.mantissa_ *= 10;
      }
    } else {
      d.scale_ += -power;
    }
    d.normalize();
    return d;
  }

  // Renders without exponent: "99.7", "-40", "1500", "0".
  std::string str() const {
    std::string digits = std::to_string(mantissa_ < 0 ? -mantissa_ : mantissa_);
    if (scale_ > 0) {
      if (static_cast<int>(digits.size()) <= scale_)
        digits.insert(0, scale_ + 1 - digits.size(), '0');
      digits.insert(digits.size() - scale_, 1, '.');
    }
    return mantissa_ < 0 ? "-" + digits : digits;
  }

  friend bool operator==(const Decimal& a, const Decimal& b) {
    return a.mantissa_ == b.mantissa_ && a.scale_ == b.scale_;
  }

  friend bool operator<(const Decimal& a, const Decimal& b) {
    return compare(a, b) < 0;
  }
  friend bool operator>(const Decimal& a, const Decimal& b) {
    return compare(a, b) > 0;
  }
  friend bool operator<=(const Decimal& a, const Decimal& b) {
    return compare(a, b) <= 0;
  }
  friend bool operator>=(const Decimal& a, const Decimal& b) {
    return compare(a, b) >= 0;
  }

 private:
  static int compare(const Decimal& a, const Decimal& b) {
    __int128 am = a.mantissa_, bm = b.mantissa_;
    for (int i = a.scale_; i < b.scale_; ++i) am *= 10;
    for (int i = b.scale_; i < a.scale_; ++i) bm *= 10;
    return am < bm ? -1 : (am > bm ? 1 : 0);
  }

  void normalize() {
    while (scale_ > 0 && mantissa_ % 10 == 0) {
      mantissa_ /= 10;
      --scale_;
    }
    if (mantissa_ == 0) scale_ = 0;
  }

  std::int64_t mantissa_ = 0;
  int scale_ = 0;
};

}  // namespace reqx
