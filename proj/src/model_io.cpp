#include "handpose/datagen/model_io.hpp"

#include <cstring>
#include <fstream>

#include "handpose/common.hpp"

namespace handpose::datagen {

namespace {

constexpr char kMagic[4] = {'H', 'P', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

void put_f64_vec(std::string& buf, const std::vector<double>& v) {
    put_u32(buf, static_cast<std::uint32_t>(v.size()));
    for (double x : v) put_f64(buf, x);
}

struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw TruncationError("model: file truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::vector<double> f64_vec() {
        const std::uint32_t n = u32();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = bytes.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void save_model(const SavedModel& model, const std::string& path) {
    nlohmann::json meta = {{"kind", model.kind},
                           {"joints", model.joints},
                           {"pca_k", model.pca_k},
                           {"config_fingerprint", model.config_fingerprint},
                           {"arch", const_cast<nn::Network<float>&>(model.net).arch()}};
    const std::string meta_str = meta.dump();

    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(meta_str.size()));
    buf.append(meta_str);

    auto params = const_cast<nn::Network<float>&>(model.net).parameters();
    put_u32(buf, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        put_u32(buf, static_cast<std::uint32_t>(p.value->size()));
        for (const float v : p.value->values) put_f64(buf, static_cast<double>(v));
    }

    put_u32(buf, model.has_prior() ? 1 : 0);
    if (model.has_prior()) {
        put_u32(buf, static_cast<std::uint32_t>(model.prior.dim()));
        put_u32(buf, static_cast<std::uint32_t>(model.prior.k()));
        put_f64_vec(buf, model.prior.mean);
        put_f64_vec(buf, model.prior.components);
        put_f64_vec(buf, model.prior.eigenvalues);
    }

    put_u32(buf, crc32(buf.data(), buf.size()));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError("cannot write " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataFormatError("write failed for " + path);
}

SavedModel load_model(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataFormatError("cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12) throw TruncationError("model: file too small");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataFormatError("model: bad magic, not a model file");

    const std::uint32_t computed_crc = crc32(bytes.data(), bytes.size() - 4);
    std::uint32_t file_crc = 0;
    for (int i = 0; i < 4; ++i)
        file_crc |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[bytes.size() - 4 + i]))
                    << (8 * i);
    if (file_crc != computed_crc) throw ChecksumError("model: checksum mismatch");

    Reader r{bytes, 4};
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw VersionMismatchError("model: unsupported version " + std::to_string(version));

    const std::uint32_t meta_len = r.u32();
    const nlohmann::json meta = nlohmann::json::parse(r.str(meta_len));

    SavedModel model;
    model.kind = meta.at("kind").get<std::string>();
    model.joints = meta.at("joints").get<int>();
    model.pca_k = meta.at("pca_k").get<int>();
    model.config_fingerprint = meta.at("config_fingerprint").get<std::string>();
    if (!expected_kind.empty() && model.kind != expected_kind)
        throw ArchitectureMismatchError("model: expected a " + expected_kind + " model, got " +
                                        model.kind);

    model.net = nn::Network<float>::from_arch(meta.at("arch"));
    auto params = model.net.parameters();
    const std::uint32_t n_params = r.u32();
    if (n_params != params.size())
        throw ArchitectureMismatchError("model: parameter tensor count mismatch");
    for (auto& p : params) {
        const std::uint32_t n = r.u32();
        if (n != p.value->size())
            throw ArchitectureMismatchError("model: parameter tensor size mismatch");
        for (auto& v : p.value->values) v = static_cast<float>(r.f64());
    }

    if (r.u32() == 1) {
        const std::uint32_t dim = r.u32();
        const std::uint32_t k = r.u32();
        model.prior.mean = r.f64_vec();
        model.prior.components = r.f64_vec();
        model.prior.eigenvalues = r.f64_vec();
        if (model.prior.mean.size() != dim || model.prior.eigenvalues.size() != k ||
            model.prior.components.size() != static_cast<std::size_t>(dim) * k)
            throw DataFormatError("model: prior block sizes inconsistent");
    }
    if (r.pos + 4 != bytes.size()) throw TruncationError("model: trailing bytes");
    return model;
}

}  // namespace handpose::datagen
