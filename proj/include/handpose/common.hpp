#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace handpose {

// ---------------------------------------------------------------------------
// Error types. Each failure class gets its own type so callers (and tests)
// can react to exactly the condition they care about.
// ---------------------------------------------------------------------------

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyCropError : DomainError {
    using DomainError::DomainError;
};

struct NoHandError : DomainError {
    using DomainError::DomainError;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File/format failures, split by cause.
struct DataFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VersionMismatchError : DataFormatError {
    using DataFormatError::DataFormatError;
};
struct ChecksumError : DataFormatError {
    using DataFormatError::DataFormatError;
};
struct TruncationError : DataFormatError {
    using DataFormatError::DataFormatError;
};
struct ArchitectureMismatchError : DataFormatError {
    using DataFormatError::DataFormatError;
};

// ---------------------------------------------------------------------------
// Small 3D vector in camera-space millimetres.
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Hashing helpers shared by file formats and config fingerprints.
// ---------------------------------------------------------------------------

// CRC-32 (IEEE 802.3 polynomial, reflected).
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

// FNV-1a 64-bit over a byte string.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex(std::uint64_t v);

// Shortest decimal form that round-trips a double exactly.
std::string format_double(double v);
double parse_double(const std::string& s);

// ---------------------------------------------------------------------------
// Index-based parallel loop. Each index writes only its own outputs, so the
// result is identical for any worker count.
// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace handpose
