#pragma once
// Binary dataset readers: the big-endian IDX container (images magic
// 0x00000803, labels magic 0x00000801) and the CIFAR-10 batch layout of
// 3073-byte records (1 label byte + 3072 channel-major pixel bytes).
// Pixels are scaled to [0,1] by /255, images flattened row-major.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

struct BadMagic : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncatedFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CountMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SizeNotMultiple : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LabelOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Split { Train, Test };

struct RealDataset {
    std::string name;
    Split split = Split::Train;
    long n = 0;
    long d = 0;
    long classes = 0;
    std::vector<double> images; // row-major n x d, values in [0,1]
    std::vector<int> labels;

    double at(long row, long col) const { return images[static_cast<std::size_t>(row) * d + col]; }

    // First n_keep rows in file order; deterministic desk-scale subsetting.
    RealDataset head(long n_keep) const {
        if (n_keep >= n) return *this;
        RealDataset out = *this;
        out.n = n_keep;
        out.images.resize(static_cast<std::size_t>(n_keep) * d);
        out.labels.resize(n_keep);
        return out;
    }
};

namespace detail {

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TruncatedFile("cannot open " + path);
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> buf(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(buf.data()), size);
    if (!in) throw TruncatedFile("short read on " + path);
    return buf;
}

inline std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

} // namespace detail

inline RealDataset load_idx(const std::string& image_path, const std::string& label_path,
                            const std::string& name = "idx", Split split = Split::Train) {
    const auto img = detail::read_file(image_path);
    const auto lab = detail::read_file(label_path);
    if (img.size() < 16) throw TruncatedFile("IDX image header truncated: " + image_path);
    if (lab.size() < 8) throw TruncatedFile("IDX label header truncated: " + label_path);
    if (detail::be32(img.data()) != 0x00000803u)
        throw BadMagic("bad IDX image magic in " + image_path);
    if (detail::be32(lab.data()) != 0x00000801u)
        throw BadMagic("bad IDX label magic in " + label_path);
    const long n = detail::be32(img.data() + 4);
    const long rows = detail::be32(img.data() + 8);
    const long cols = detail::be32(img.data() + 12);
    const long n_lab = detail::be32(lab.data() + 4);
    if (n != n_lab) throw CountMismatch("IDX image/label counts differ");
    const long d = rows * cols;
    if (static_cast<long>(img.size()) != 16 + n * d) throw TruncatedFile("IDX image payload truncated");
    if (static_cast<long>(lab.size()) != 8 + n) throw TruncatedFile("IDX label payload truncated");

    RealDataset ds;
    ds.name = name;
    ds.split = split;
    ds.n = n;
    ds.d = d;
    ds.images.resize(static_cast<std::size_t>(n) * d);
    ds.labels.resize(n);
    for (long i = 0; i < n; ++i) {
        const unsigned char* px = img.data() + 16 + static_cast<std::size_t>(i) * d;
        double* out = ds.images.data() + static_cast<std::size_t>(i) * d;
        for (long j = 0; j < d; ++j) out[j] = px[j] / 255.0;
        ds.labels[i] = lab[8 + i];
    }
    int max_label = 0;
    for (int v : ds.labels) max_label = std::max(max_label, v);
    ds.classes = max_label + 1;
    return ds;
}

inline RealDataset load_cifar10(const std::vector<std::string>& batch_paths,
                                const std::string& name = "cifar10", Split split = Split::Train) {
    constexpr long kRecord = 3073;
    constexpr long kPixels = 3072;
    RealDataset ds;
    ds.name = name;
    ds.split = split;
    ds.d = kPixels;
    ds.classes = 10;
    for (const std::string& path : batch_paths) {
        const auto buf = detail::read_file(path);
        if (buf.size() % kRecord != 0)
            throw SizeNotMultiple("CIFAR-10 batch size not a multiple of 3073: " + path);
        const long n = static_cast<long>(buf.size()) / kRecord;
        for (long i = 0; i < n; ++i) {
            const unsigned char* rec = buf.data() + static_cast<std::size_t>(i) * kRecord;
            if (rec[0] > 9) throw LabelOutOfRange("CIFAR-10 label byte > 9 in " + path);
            ds.labels.push_back(rec[0]);
            const std::size_t base = ds.images.size();
            ds.images.resize(base + kPixels);
            for (long j = 0; j < kPixels; ++j) ds.images[base + j] = rec[1 + j] / 255.0;
        }
        ds.n += n;
    }
    return ds;
}

} // namespace phaselab
