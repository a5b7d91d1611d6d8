#pragma once

// Encodable objects and their canonical MessagePack serialization.

#include <concepts>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace netsel::mdl {

/// Integer, real, or list of values. Tuples are encoded as lists.
class Value {
 public:
  using List = std::vector<Value>;

  Value() : v_(List{}) {}
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  Value(T x) : v_(checked(x)) {}  // NOLINT(google-explicit-constructor)
  Value(double x) : v_(x) {}      // NOLINT(google-explicit-constructor)
  Value(List items) : v_(std::move(items)) {}  // NOLINT(google-explicit-constructor)

  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(v_); }
  bool is_real() const noexcept { return std::holds_alternative<double>(v_); }
  bool is_list() const noexcept { return std::holds_alternative<List>(v_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  const List& as_list() const { return std::get<List>(v_); }
  List& as_list() { return std::get<List>(v_); }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  template <std::integral T>
  static std::int64_t checked(T x);

  std::variant<std::int64_t, double, List> v_;
};

/// Throws InvalidArgument for unsigned values above INT64_MAX.
void throw_int_overflow();

template <std::integral T>
std::int64_t Value::checked(T x) {
  if constexpr (std::is_unsigned_v<T> && sizeof(T) >= sizeof(std::int64_t)) {
    if (x > static_cast<T>(INT64_MAX)) throw_int_overflow();
  }
  return static_cast<std::int64_t>(x);
}

/// List of integers from any integral range.
template <typename Range>
Value int_list(const Range& ids) {
  Value::List out;
  out.reserve(std::size(ids));
  for (auto x : ids) out.emplace_back(x);
  return Value(std::move(out));
}

/// Canonical MessagePack bytes: smallest integer form, float64 reals, smallest
/// array header. Throws InvalidArgument on non-finite reals.
std::vector<std::uint8_t> serialize(const Value& v);

}  // namespace netsel::mdl
