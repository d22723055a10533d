#include "salt/trajectory_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "salt/errors.hpp"

namespace salt {

static_assert(std::endian::native == std::endian::little,
              "trajectory files are written in host byte order, which must be little-endian");

namespace {

constexpr char kMagic[4] = {'S', 'L', 'T', 'V'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path, const char* what) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw IoError(path.string() + ": truncated header (" + what + ")");
    return v;
}

std::uint64_t header_bytes(std::size_t modes) { return 4 + 4 + 4 + 8 + 8 + 8 + 4 + modes * 16; }

}  // namespace

TrajectoryWriter::TrajectoryWriter(std::filesystem::path path, const Grid& grid, double dt,
                                   std::uint64_t seed, const NoiseModel& noise)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp"), grid_(grid) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open " + tmp_.string() + " for writing");
    out_.write(kMagic, 4);
    put<std::uint32_t>(out_, kTrajectoryVersion);
    put<std::uint32_t>(out_, static_cast<std::uint32_t>(grid.n()));
    put<std::uint64_t>(out_, 0);  // patched on close
    put<double>(out_, dt);
    put<std::uint64_t>(out_, seed);
    put<std::uint32_t>(out_, static_cast<std::uint32_t>(noise.modes().size()));
    for (const auto& m : noise.modes()) {
        put<std::int32_t>(out_, m.k.k1);
        put<std::int32_t>(out_, m.k.k2);
        put<double>(out_, m.alpha);
    }
}

TrajectoryWriter::~TrajectoryWriter() {
    if (!closed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void TrajectoryWriter::write(double t, const ScalarField& omega) {
    if (closed_) throw IoError("write after close on " + path_.string());
    require_same_grid(grid_, omega.grid(), "trajectory writer");
    if (count_ > 0 && !(t > last_t_))
        throw std::invalid_argument("trajectory times must increase strictly");
    put<double>(out_, t);
    const auto values = omega.values();
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out_) throw IoError("write failed on " + tmp_.string());
    last_t_ = t;
    ++count_;
}

void TrajectoryWriter::close() {
    if (closed_) return;
    out_.seekp(12);
    put<std::uint64_t>(out_, count_);
    out_.close();
    if (!out_) throw IoError("write failed on " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
    closed_ = true;
}

TrajectoryReader::TrajectoryReader(const std::filesystem::path& path) : path_(path) {
    if (!std::filesystem::exists(path)) throw MissingInputError("trajectory file not found: " + path.string());
    in_.open(path, std::ios::binary);
    if (!in_) throw MissingInputError("cannot open trajectory file " + path.string());

    char magic[4];
    if (!in_.read(magic, 4)) throw IoError(path.string() + ": truncated header (magic)");
    if (std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": not a trajectory file (bad magic)");
    const auto version = get<std::uint32_t>(in_, path, "version");
    if (version != kTrajectoryVersion)
        throw IoError(path.string() + ": unsupported version " + std::to_string(version));
    const auto n = get<std::uint32_t>(in_, path, "grid size");
    try {
        header_.grid = Grid(static_cast<int>(n));
    } catch (const DimensionError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    header_.count = get<std::uint64_t>(in_, path, "count");
    header_.dt = get<double>(in_, path, "dt");
    header_.seed = get<std::uint64_t>(in_, path, "seed");
    const auto modes = get<std::uint32_t>(in_, path, "mode count");
    std::vector<NoiseMode> noise;
    for (std::uint32_t m = 0; m < modes; ++m) {
        const auto k1 = get<std::int32_t>(in_, path, "mode");
        const auto k2 = get<std::int32_t>(in_, path, "mode");
        const auto alpha = get<double>(in_, path, "mode");
        noise.push_back({{k1, k2}, alpha});
    }
    header_.noise = NoiseModel(std::move(noise));

    const std::uint64_t record = 8 * (1 + header_.grid.size());
    const std::uint64_t expected = header_bytes(modes) + header_.count * record;
    const std::uint64_t actual = std::filesystem::file_size(path);
    if (actual < expected) {
        const std::uint64_t complete = (actual - header_bytes(modes)) / record;
        throw IoError(path.string() + ": truncated at record " + std::to_string(complete) + " of " +
                      std::to_string(header_.count));
    }
    if (actual > expected)
        throw IoError(path.string() + ": " + std::to_string(actual - expected) + " trailing bytes after " +
                      std::to_string(header_.count) + " records");
}

std::optional<std::pair<double, ScalarField>> TrajectoryReader::next() {
    if (read_ == header_.count) return std::nullopt;
    double t = 0.0;
    std::vector<double> values(header_.grid.size());
    in_.read(reinterpret_cast<char*>(&t), sizeof t);
    in_.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in_) throw IoError(path_.string() + ": truncated at record " + std::to_string(read_));
    if (!std::isfinite(t) || (read_ > 0 && !(t > last_t_)))
        throw IoError(path_.string() + ": record " + std::to_string(read_) + " has a non-increasing time");
    last_t_ = t;
    ++read_;
    return std::make_pair(t, ScalarField(header_.grid, std::move(values)));
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    TrajectoryWriter writer(path, traj.grid(), traj.dt(), traj.seed(), traj.noise());
    for (std::size_t s = 0; s < traj.size(); ++s) writer.write(traj.times()[s], traj[s]);
    writer.close();
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    TrajectoryReader reader(path);
    const auto& h = reader.header();
    Trajectory traj(h.grid, h.dt, h.seed, h.noise);
    while (auto rec = reader.next()) traj.append(rec->first, std::move(rec->second));
    return traj;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw IoError("write failed on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace salt
