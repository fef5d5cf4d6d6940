#ifndef POLSR_WIRE_HPP
#define POLSR_WIRE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "polsr/geo.hpp"

// Codecs for the link-quality Hello and TC message bodies, in the plain
// OLSRd layout (Original) and the position/speed-carrying layout (Modified).
//
// Hello Original header (8): type, 0, htime, willingness, seq(2), 0, 0
// Hello Modified header (16): type, 0, htime, willingness, seq(2), alt(2),
//                             lat(float32), lon(float32)
// TC header (4): ansn(2), 0, 0
// Neighbor block (8): addr(4), lq, nlq, reserved(2) | speed Q8.8 (2)
//
// All multi-byte fields are big-endian. The OLSR message envelope
// (originator address, message sequence number) is not part of the body;
// decoders take those values from the caller.

namespace polsr::wire {

using Address = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

enum class Variant { Original, Modified };

inline constexpr std::uint8_t kHelloType = 201;
inline constexpr std::uint8_t kWillDefault = 3;

inline constexpr std::size_t kHelloHeaderOriginal = 8;
inline constexpr std::size_t kHelloHeaderModified = 16;
inline constexpr std::size_t kTcHeader = 4;
inline constexpr std::size_t kBlockSize = 8;

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NeighborBlock {
    Address addr = 0;
    std::uint8_t lq = 0;   // sender's receive ratio of this neighbor's Hellos
    std::uint8_t nlq = 0;  // ratio the neighbor reported back
    double speed = 0.0;    // averaged relative speed, m/s; zero in Original

    bool operator==(const NeighborBlock&) const = default;
};

struct HelloMessage {
    Variant variant = Variant::Original;
    Address originator = 0;
    std::uint16_t seq = 0;
    std::uint8_t htime = 0;
    std::uint8_t willingness = kWillDefault;
    std::optional<geo::GeoPosition> position;  // Modified only
    std::vector<NeighborBlock> neighbors;

    bool operator==(const HelloMessage&) const = default;

    /// Block naming addr, if any.
    const NeighborBlock* find(Address addr) const;
};

struct TcMessage {
    Variant variant = Variant::Original;
    Address originator = 0;  // envelope
    std::uint16_t seq = 0;   // envelope
    std::uint16_t ansn = 0;
    std::vector<NeighborBlock> advertised;

    bool operator==(const TcMessage&) const = default;
};

std::size_t hello_header_size(Variant v);

Bytes encode_hello(const HelloMessage& m);
HelloMessage decode_hello(std::span<const std::uint8_t> b, Variant v, Address originator);

Bytes encode_tc(const TcMessage& m);
TcMessage decode_tc(std::span<const std::uint8_t> b, Variant v, Address originator,
                    std::uint16_t seq);

// Quantizers. The ratio maps [0,1] linearly onto a byte; the speed is
// signed Q8.8 m/s; altitude is signed integer meters.
std::uint8_t quantize_ratio(double r);
double dequantize_ratio(std::uint8_t b);

std::int16_t quantize_speed(double v);
double dequantize_speed(std::int16_t q);
inline constexpr double kMaxSpeed = 32767.0 / 256.0;

std::int16_t quantize_altitude(double alt);

/// RFC 3626 mantissa/exponent time encoding (C = 1/16 s).
std::uint8_t encode_vtime(double seconds);
double decode_vtime(std::uint8_t b);

/// Sequence-number freshness: true when a is newer than b modulo 2^16.
bool seq_newer(std::uint16_t a, std::uint16_t b);

}  // namespace polsr::wire

#endif  // POLSR_WIRE_HPP
