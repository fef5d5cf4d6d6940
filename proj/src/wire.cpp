#include "polsr/wire.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace polsr::wire {

namespace {

void put16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put32(Bytes& out, std::uint32_t v)
{
    put16(out, static_cast<std::uint16_t>(v >> 16));
    put16(out, static_cast<std::uint16_t>(v));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at)
{
    return (static_cast<std::uint32_t>(get16(b, at)) << 16) | get16(b, at + 2);
}

void put_block(Bytes& out, const NeighborBlock& n, Variant v)
{
    put32(out, n.addr);
    out.push_back(n.lq);
    out.push_back(n.nlq);
    if (v == Variant::Modified) {
        put16(out, static_cast<std::uint16_t>(quantize_speed(n.speed)));
    } else {
        if (n.speed != 0.0) {
            throw WireError("original layout has no speed field");
        }
        put16(out, 0);
    }
}

std::vector<NeighborBlock> get_blocks(std::span<const std::uint8_t> b, std::size_t header,
                                      Variant v)
{
    std::vector<NeighborBlock> blocks;
    blocks.reserve((b.size() - header) / kBlockSize);
    for (std::size_t at = header; at + kBlockSize <= b.size(); at += kBlockSize) {
        NeighborBlock n;
        n.addr = get32(b, at);
        n.lq = b[at + 4];
        n.nlq = b[at + 5];
        if (v == Variant::Modified) {
            n.speed = dequantize_speed(static_cast<std::int16_t>(get16(b, at + 6)));
        }
        blocks.push_back(n);
    }
    return blocks;
}

void check_length(std::span<const std::uint8_t> b, std::size_t header, const char* what)
{
    if (b.size() < header) {
        throw WireError(std::string(what) + ": truncated header (" + std::to_string(b.size()) +
                        " bytes)");
    }
    if ((b.size() - header) % kBlockSize != 0) {
        throw WireError(std::string(what) + ": length " + std::to_string(b.size()) +
                        " is not header + 8k");
    }
}

}  // namespace

const NeighborBlock* HelloMessage::find(Address addr) const
{
    for (const auto& n : neighbors) {
        if (n.addr == addr) {
            return &n;
        }
    }
    return nullptr;
}

std::size_t hello_header_size(Variant v)
{
    return v == Variant::Modified ? kHelloHeaderModified : kHelloHeaderOriginal;
}

Bytes encode_hello(const HelloMessage& m)
{
    const bool modified = m.variant == Variant::Modified;
    if (modified != m.position.has_value()) {
        throw WireError(modified ? "modified Hello requires a position"
                                 : "original Hello cannot carry a position");
    }
    Bytes out;
    out.reserve(hello_header_size(m.variant) + kBlockSize * m.neighbors.size());
    out.push_back(kHelloType);
    out.push_back(0);
    out.push_back(m.htime);
    out.push_back(m.willingness);
    put16(out, m.seq);
    if (modified) {
        const auto& p = *m.position;
        if (!geo::is_valid(p)) {
            throw WireError("Hello position out of range");
        }
        put16(out, static_cast<std::uint16_t>(quantize_altitude(p.alt)));
        put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.lat)));
        put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p.lon)));
    } else {
        put16(out, 0);
    }
    for (const auto& n : m.neighbors) {
        put_block(out, n, m.variant);
    }
    return out;
}

HelloMessage decode_hello(std::span<const std::uint8_t> b, Variant v, Address originator)
{
    const std::size_t header = hello_header_size(v);
    check_length(b, header, "Hello");
    if (b[0] != kHelloType) {
        throw WireError("Hello: unexpected message type " + std::to_string(b[0]));
    }
    HelloMessage m;
    m.variant = v;
    m.originator = originator;
    m.htime = b[2];
    m.willingness = b[3];
    m.seq = get16(b, 4);
    if (v == Variant::Modified) {
        geo::GeoPosition p;
        p.alt = static_cast<std::int16_t>(get16(b, 6));
        p.lat = std::bit_cast<float>(get32(b, 8));
        p.lon = std::bit_cast<float>(get32(b, 12));
        if (!geo::is_valid(p)) {
            throw WireError("Hello: position out of range");
        }
        m.position = p;
    }
    m.neighbors = get_blocks(b, header, v);
    return m;
}

Bytes encode_tc(const TcMessage& m)
{
    Bytes out;
    out.reserve(kTcHeader + kBlockSize * m.advertised.size());
    put16(out, m.ansn);
    put16(out, 0);
    for (const auto& n : m.advertised) {
        put_block(out, n, m.variant);
    }
    return out;
}

TcMessage decode_tc(std::span<const std::uint8_t> b, Variant v, Address originator,
                    std::uint16_t seq)
{
    check_length(b, kTcHeader, "TC");
    TcMessage m;
    m.variant = v;
    m.originator = originator;
    m.seq = seq;
    m.ansn = get16(b, 0);
    m.advertised = get_blocks(b, kTcHeader, v);
    return m;
}

std::uint8_t quantize_ratio(double r)
{
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("ratio outside [0, 1]: " + std::to_string(r));
    }
    return static_cast<std::uint8_t>(std::lround(r * 255.0));
}

double dequantize_ratio(std::uint8_t b)
{
    return b / 255.0;
}

std::int16_t quantize_speed(double v)
{
    const double q = std::round(v * 256.0);
    if (!(q >= -32768.0 && q <= 32767.0)) {
        throw WireError("speed outside Q8.8 range: " + std::to_string(v));
    }
    return static_cast<std::int16_t>(q);
}

double dequantize_speed(std::int16_t q)
{
    return q / 256.0;
}

std::int16_t quantize_altitude(double alt)
{
    const double q = std::round(alt);
    if (!(q >= -32768.0 && q <= 32767.0)) {
        throw WireError("altitude outside int16 range: " + std::to_string(alt));
    }
    return static_cast<std::int16_t>(q);
}

std::uint8_t encode_vtime(double seconds)
{
    constexpr double kC = 1.0 / 16.0;
    if (!(seconds >= kC)) {
        return 0;
    }
    int b = static_cast<int>(std::floor(std::log2(seconds / kC)));
    int a = static_cast<int>(std::lround(16.0 * (seconds / (kC * std::ldexp(1.0, b)) - 1.0)));
    if (a >= 16) {
        a = 0;
        ++b;
    }
    if (b > 15) {
        return 0xff;
    }
    return static_cast<std::uint8_t>((a << 4) | b);
}

double decode_vtime(std::uint8_t byte)
{
    const int a = byte >> 4;
    const int b = byte & 0x0f;
    return (1.0 / 16.0) * (1.0 + a / 16.0) * std::ldexp(1.0, b);
}

bool seq_newer(std::uint16_t a, std::uint16_t b)
{
    const std::uint16_t diff = static_cast<std::uint16_t>(a - b);
    return diff != 0 && diff < 0x8000;
}

}  // namespace polsr::wire
