#include "handpose/datagen/dataset.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

#include "handpose/common.hpp"

namespace handpose::datagen {

namespace {

constexpr char kMagic[4] = {'H', 'P', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint16_t u16() {
        need(2);
        const auto lo = static_cast<unsigned char>(bytes_[pos_]);
        const auto hi = static_cast<unsigned char>(bytes_[pos_ + 1]);
        pos_ += 2;
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }

    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void raw(char* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw TruncationError("dataset: file truncated");
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataFormatError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataFormatError("write failed for " + path);
}

}  // namespace

Dataset generate_dataset(int n_frames, int n_subjects, const SyntheticSceneConfig& cfg,
                         std::uint64_t seed, int subject_base, int threads) {
    if (n_frames < 1) throw InsufficientDataError("generate_dataset: need at least one frame");
    if (n_subjects < 1) throw InsufficientDataError("generate_dataset: need at least one subject");

    std::vector<HandModel> models;
    models.reserve(n_subjects);
    for (int s = 0; s < n_subjects; ++s)
        models.push_back(make_hand_model(cfg.subject_seed, subject_base + s,
                                         cfg.yaw_habit_range_deg));

    Dataset ds;
    ds.intrinsics = cfg.intrinsics;
    ds.frames.resize(n_frames);
    ds.poses.resize(n_frames);
    ds.subjects.resize(n_frames);

    parallel_for(static_cast<std::size_t>(n_frames), threads, [&](std::size_t i) {
        const int subject = static_cast<int>(i) % n_subjects;
        Rng rng(mix_seed(seed, i, 0x6672616dull));
        const PoseSample sample = sample_pose(models[subject], cfg, rng);
        ds.frames[i] = render_depth(models[subject], sample.pose, cfg, rng);
        ds.poses[i] = sample.pose;
        ds.subjects[i] = subject_base + subject;
    });
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    if (ds.frames.empty()) throw InsufficientDataError("save_dataset: empty dataset");
    const int w = ds.frames[0].width;
    const int h = ds.frames[0].height;

    std::string buf;
    buf.reserve(64 + ds.size() * (4 + static_cast<std::size_t>(w) * h * 2));
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(ds.size()));
    put_u32(buf, static_cast<std::uint32_t>(w));
    put_u32(buf, static_cast<std::uint32_t>(h));
    put_u32(buf, static_cast<std::uint32_t>(ds.joint_count()));
    put_f64(buf, ds.intrinsics.fx);
    put_f64(buf, ds.intrinsics.fy);
    put_f64(buf, ds.intrinsics.cx);
    put_f64(buf, ds.intrinsics.cy);

    for (std::size_t i = 0; i < ds.size(); ++i) {
        const DepthFrame& f = ds.frames[i];
        if (f.width != w || f.height != h)
            throw ShapeError("save_dataset: frames must share one resolution");
        put_u32(buf, static_cast<std::uint32_t>(ds.subjects[i]));
        for (const std::uint16_t d : f.depth) {
            buf.push_back(static_cast<char>(d & 0xFF));
            buf.push_back(static_cast<char>((d >> 8) & 0xFF));
        }
    }
    put_u32(buf, crc32(buf.data(), buf.size()));
    write_file(path, buf);

    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        nlohmann::json joints = nlohmann::json::array();
        for (const Vec3& j : ds.poses[i].joints) joints.push_back({j.x, j.y, j.z});
        frames.push_back({{"subject", ds.subjects[i]}, {"joints", joints}});
    }
    const nlohmann::json sidecar = {{"version", kVersion}, {"frames", frames}};
    write_file(path + ".json", sidecar.dump());
}

Dataset load_dataset(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 4 + 4) throw TruncationError("dataset: file too small");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataFormatError("dataset: bad magic, not a dataset file");

    // CRC is the last 4 bytes; verify before parsing the body.
    const std::uint32_t computed_crc = crc32(bytes.data(), bytes.size() - 4);
    std::uint32_t file_crc = 0;
    for (int i = 0; i < 4; ++i)
        file_crc |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[bytes.size() - 4 + i]))
                    << (8 * i);
    if (file_crc != computed_crc) throw ChecksumError("dataset: checksum mismatch");

    Reader r(bytes);
    char magic[4];
    r.raw(magic, 4);
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw VersionMismatchError("dataset: unsupported version " + std::to_string(version));
    const std::uint32_t count = r.u32();
    const int w = static_cast<int>(r.u32());
    const int h = static_cast<int>(r.u32());
    const int joints = static_cast<int>(r.u32());

    Dataset ds;
    ds.intrinsics.fx = r.f64();
    ds.intrinsics.fy = r.f64();
    ds.intrinsics.cx = r.f64();
    ds.intrinsics.cy = r.f64();
    ds.intrinsics.width = w;
    ds.intrinsics.height = h;

    ds.frames.reserve(count);
    ds.subjects.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ds.subjects.push_back(static_cast<int>(r.u32()));
        DepthFrame f(w, h);
        for (auto& d : f.depth) d = r.u16();
        ds.frames.push_back(std::move(f));
    }
    if (r.pos() + 4 != bytes.size()) throw TruncationError("dataset: trailing bytes");

    // Annotations live in the sidecar.
    const nlohmann::json sidecar = nlohmann::json::parse(read_file(path + ".json"));
    if (sidecar.at("version").get<std::uint32_t>() != kVersion)
        throw VersionMismatchError("dataset: sidecar version mismatch");
    const auto& frames = sidecar.at("frames");
    if (frames.size() != count) throw DataFormatError("dataset: sidecar frame count mismatch");
    ds.poses.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto& entry = frames[i];
        if (entry.at("subject").get<int>() != ds.subjects[i])
            throw DataFormatError("dataset: sidecar subject mismatch");
        Pose3D pose;
        for (const auto& j : entry.at("joints"))
            pose.joints.push_back({j[0].get<double>(), j[1].get<double>(), j[2].get<double>()});
        if (static_cast<int>(pose.joint_count()) != joints)
            throw DataFormatError("dataset: sidecar joint count mismatch");
        ds.poses.push_back(std::move(pose));
    }
    return ds;
}

}  // namespace handpose::datagen
