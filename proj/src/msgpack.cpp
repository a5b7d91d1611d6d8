#include "netsel/msgpack.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "netsel/error.hpp"

namespace netsel::mdl {

void throw_int_overflow() { throw InvalidArgument("encodable integer exceeds the signed 64-bit range"); }

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void byte(std::uint8_t b) { out_.push_back(b); }

  template <typename T>
  void big_endian(T x) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(x);
    for (int s = static_cast<int>(sizeof(T)) - 1; s >= 0; --s)
      out_.push_back(static_cast<std::uint8_t>(u >> (8 * s)));
  }

  void integer(std::int64_t x) {
    if (x >= 0) {
      if (x < 128) {
        byte(static_cast<std::uint8_t>(x));
      } else if (x <= 0xff) {
        byte(0xcc);
        big_endian(static_cast<std::uint8_t>(x));
      } else if (x <= 0xffff) {
        byte(0xcd);
        big_endian(static_cast<std::uint16_t>(x));
      } else if (x <= 0xffffffffLL) {
        byte(0xce);
        big_endian(static_cast<std::uint32_t>(x));
      } else {
        byte(0xcf);
        big_endian(static_cast<std::uint64_t>(x));
      }
    } else if (x >= -32) {
      byte(static_cast<std::uint8_t>(static_cast<std::int8_t>(x)));
    } else if (x >= INT8_MIN) {
      byte(0xd0);
      big_endian(static_cast<std::int8_t>(x));
    } else if (x >= INT16_MIN) {
      byte(0xd1);
      big_endian(static_cast<std::int16_t>(x));
    } else if (x >= INT32_MIN) {
      byte(0xd2);
      big_endian(static_cast<std::int32_t>(x));
    } else {
      byte(0xd3);
      big_endian(x);
    }
  }

  void real(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("cannot encode a non-finite real");
    byte(0xcb);
    big_endian(std::bit_cast<std::uint64_t>(x));
  }

  void array_header(std::size_t n) {
    if (n < 16) {
      byte(static_cast<std::uint8_t>(0x90 | n));
    } else if (n <= 0xffff) {
      byte(0xdc);
      big_endian(static_cast<std::uint16_t>(n));
    } else if (n <= 0xffffffffULL) {
      byte(0xdd);
      big_endian(static_cast<std::uint32_t>(n));
    } else {
      throw InvalidArgument("list too long to encode");
    }
  }

  void value(const Value& v) {
    if (v.is_int()) {
      integer(v.as_int());
    } else if (v.is_real()) {
      real(v.as_real());
    } else {
      const auto& items = v.as_list();
      array_header(items.size());
      for (const auto& item : items) value(item);
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
};

}  // namespace

std::vector<std::uint8_t> serialize(const Value& v) {
  std::vector<std::uint8_t> out;
  Writer w(out);
  w.value(v);
  return out;
}

}  // namespace netsel::mdl
