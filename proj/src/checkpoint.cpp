#include "vrkg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <tuple>

#include "vrkg/error.hpp"

namespace vrkg {

namespace {

constexpr char kMagic[8] = {'V', 'R', 'K', 'G', 'C', 'K', 'P', 'T'};
constexpr char kDumpMagic[8] = {'V', 'R', 'K', 'G', 'D', 'U', 'M', 'P'};

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U bits;
    std::memcpy(&bits, &value, sizeof bits);
    for (std::size_t i = 0; i < sizeof bits; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
public:
    Reader(std::string bytes, std::string source) : bytes_(std::move(bytes)), source_(std::move(source)) {}

    template <typename T>
    T get() {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        if (pos_ + sizeof(U) > bytes_.size()) throw data_error(source_ + ": truncated file");
        U bits = 0;
        for (std::size_t i = 0; i < sizeof bits; ++i) {
            bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof bits;
        T value;
        std::memcpy(&value, &bits, sizeof value);
        return value;
    }

    void expect_magic(const char (&magic)[8]) {
        if (bytes_.size() < 8 || std::memcmp(bytes_.data(), magic, 8) != 0) {
            throw data_error(source_ + ": bad magic, not a " + std::string(magic, 8) + " file");
        }
        pos_ = 8;
    }

    void read_matrix(Matrix& m) {
        if ((bytes_.size() - pos_) / 8 < m.size()) throw data_error(source_ + ": truncated file");
        for (double& v : m.flat()) v = get<double>();
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    const std::string& source() const { return source_; }

private:
    std::string bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw data_error("write failed for '" + path.string() + "'");
}

void append_matrix(std::string& out, const Matrix& m) {
    for (double v : m.flat()) put_le(out, v);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const ParameterSet& p = ckpt.params;
    std::string out(kMagic, 8);
    put_le<std::uint64_t>(out, kCheckpointVersion);
    for (std::uint64_t v : {std::uint64_t{p.user_emb.rows()}, std::uint64_t{p.entity_emb.rows()},
                            std::uint64_t{p.relation_feat.rows()}, std::uint64_t{p.dim()},
                            std::uint64_t{p.virtual_count()}, ckpt.iterations, ckpt.layers}) {
        put_le(out, v);
    }
    for (Block b : kAllBlocks) append_matrix(out, p.block(b));
    for (std::int32_t a : ckpt.assignment) put_le(out, a);
    write_bytes(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    Reader in(slurp(path), path.string());
    in.expect_magic(kMagic);
    const auto version = in.get<std::uint64_t>();
    if (version != kCheckpointVersion) {
        throw data_error(in.source() + ": unsupported checkpoint version " + std::to_string(version));
    }
    std::uint64_t counts[7];
    for (auto& c : counts) c = in.get<std::uint64_t>();
    const auto [m, e, r, d, k, q, l] =
        std::tuple{counts[0], counts[1], counts[2], counts[3], counts[4], counts[5], counts[6]};
    // Reject absurd headers before allocating; every count is bounded by the payload size.
    for (std::uint64_t c : {m, e, r, d, k}) {
        if (c > in.remaining()) throw data_error(in.source() + ": truncated file");
    }
    const std::uint64_t doubles = (m + e + r + k) * d + k;
    if (d == 0 || k == 0 || doubles > in.remaining() / 8) throw data_error(in.source() + ": truncated file");

    Checkpoint ckpt;
    ckpt.iterations = q;
    ckpt.layers = l;
    ParameterSet& p = ckpt.params;
    p.user_emb = Matrix(m, d);
    p.entity_emb = Matrix(e, d);
    p.relation_feat = Matrix(r, d);
    p.centroids = Matrix(k, d);
    p.fusion_logits = Matrix(1, k);
    for (Block b : kAllBlocks) in.read_matrix(p.block(b));
    if (in.remaining() != r * 4) throw data_error(in.source() + ": assignment section has the wrong size");
    ckpt.assignment.resize(r);
    for (auto& a : ckpt.assignment) {
        a = in.get<std::int32_t>();
        if (a < 0 || static_cast<std::uint64_t>(a) >= k) throw data_error(in.source() + ": assignment out of range");
    }
    return ckpt;
}

void save_matrices(const std::filesystem::path& path, const std::vector<Matrix>& matrices) {
    std::string out(kDumpMagic, 8);
    put_le<std::uint64_t>(out, kCheckpointVersion);
    put_le<std::uint64_t>(out, matrices.size());
    for (const Matrix& m : matrices) {
        put_le<std::uint64_t>(out, m.rows());
        put_le<std::uint64_t>(out, m.cols());
        append_matrix(out, m);
    }
    write_bytes(path, out);
}

std::vector<Matrix> load_matrices(const std::filesystem::path& path) {
    Reader in(slurp(path), path.string());
    in.expect_magic(kDumpMagic);
    if (in.get<std::uint64_t>() != kCheckpointVersion) throw data_error(in.source() + ": unsupported version");
    const auto count = in.get<std::uint64_t>();
    std::vector<Matrix> out;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto rows = in.get<std::uint64_t>();
        const auto cols = in.get<std::uint64_t>();
        if (cols != 0 && rows > in.remaining() / 8 / cols) throw data_error(in.source() + ": truncated file");
        Matrix m(rows, cols);
        in.read_matrix(m);
        out.push_back(std::move(m));
    }
    if (in.remaining() != 0) throw data_error(in.source() + ": trailing bytes");
    return out;
}

}  // namespace vrkg
