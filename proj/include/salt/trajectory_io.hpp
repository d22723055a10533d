#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>

#include "salt/solver.hpp"

namespace salt {

/// Binary trajectory file, little-endian:
///   "SLTV" u32 version, u32 n, u64 count, f64 dt, u64 seed,
///   u32 modes, modes x (i32 k1, i32 k2, f64 alpha),
///   count x (f64 t, n*n f64 row-major values).
struct TrajectoryHeader {
    Grid grid{8};
    std::uint64_t count = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    NoiseModel noise;

    bool operator==(const TrajectoryHeader&) const = default;
};

inline constexpr std::uint32_t kTrajectoryVersion = 1;

/// Streams snapshots to <path>.tmp and renames over path on close(), so a
/// crash never leaves a half-written file under the final name.
class TrajectoryWriter {
public:
    TrajectoryWriter(std::filesystem::path path, const Grid& grid, double dt, std::uint64_t seed,
                     const NoiseModel& noise);
    ~TrajectoryWriter();
    TrajectoryWriter(const TrajectoryWriter&) = delete;
    TrajectoryWriter& operator=(const TrajectoryWriter&) = delete;

    void write(double t, const ScalarField& omega);
    void close();
    std::uint64_t count() const { return count_; }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    Grid grid_;
    std::uint64_t count_ = 0;
    double last_t_ = 0.0;
    bool closed_ = false;
};

/// Reads a trajectory one record at a time. The constructor validates the
/// header and the file size, so truncation is reported before any record is
/// consumed.
class TrajectoryReader {
public:
    explicit TrajectoryReader(const std::filesystem::path& path);

    const TrajectoryHeader& header() const { return header_; }
    /// Next (t, omega), or nullopt after the last record.
    std::optional<std::pair<double, ScalarField>> next();

private:
    std::filesystem::path path_;
    std::ifstream in_;
    TrajectoryHeader header_;
    std::uint64_t read_ = 0;
    double last_t_ = 0.0;
};

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// Writes text to path atomically (temp file then rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace salt
