#include "aic/encode.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace aic {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw NumericError("encode: lattice accumulator overflowed 64 bits");
    return out;
}

// Round q_i to lattice units of delta/2. Entries must land on the lattice to
// within 1e-6 and inside the alphabet's range; zero entries are tolerated so
// an all-zero vector encodes to the zero codeword.
std::int64_t to_lattice(double qi, const MidriseAlphabet& a) {
    const double units = qi / (a.delta / 2.0);
    const double n = std::round(units);
    if (std::abs(units - n) >= 1e-6)
        throw FormatError("encode: entry off the delta/2 lattice (q was not alphabet-valued)");
    const auto ni = static_cast<std::int64_t>(n);
    if (std::llabs(ni) > 2 * a.levels - 1)
        throw FormatError("encode: entry beyond the top alphabet level");
    return ni;
}

void fill_values(Codeword& c) {
    c.values.resize(c.lattice_ints.size());
    for (std::size_t i = 0; i < c.lattice_ints.size(); ++i)
        c.values[i] = static_cast<double>(c.lattice_ints[i]) * (c.delta / 2.0);
}

}  // namespace

double bitrate(int l, int m, int r, int levels) {
    if (l < 1 || m < 1 || r < 0 || levels < 1) throw std::invalid_argument("bitrate: bad arguments");
    return l * (r + 1) * std::log2(static_cast<double>(m)) +
           l * std::log2(2.0 * static_cast<double>(levels));
}

Codeword encode_dense(MatView b, std::span<const double> q, int r, const MidriseAlphabet& a) {
    if (r < 0) throw std::invalid_argument("encode_dense: order must be >= 0");
    if (static_cast<int>(q.size()) != b.cols)
        throw std::invalid_argument("encode_dense: q length must match the encoder width");

    std::vector<std::int64_t> lat(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) lat[i] = to_lattice(q[i], a);
    for (int t = 0; t < r; ++t) {
        std::int64_t acc = 0;
        for (auto& v : lat) {
            acc = checked_add(acc, v);
            v = acc;
        }
    }

    Codeword c;
    c.l = b.rows;
    c.m = b.cols;
    c.r = r;
    c.levels = a.levels;
    c.delta = a.delta;
    c.rate_bits = bitrate(c.l, c.m, c.r, c.levels);
    c.lattice_ints.assign(b.rows, 0);
    for (int i = 0; i < b.rows; ++i) {
        const double* bi = b.row(i);
        std::int64_t s = 0;
        for (int j = 0; j < b.cols; ++j) s = checked_add(s, bi[j] > 0 ? lat[j] : -lat[j]);
        c.lattice_ints[i] = s;
    }
    fill_values(c);
    return c;
}

StreamEncoder::StreamEncoder(int l, int m, int r, const MidriseAlphabet& a, Mode mode)
    : l_(l), m_(m), r_(r), alphabet_(a), mode_(mode), sums_(std::max(r, 0), 0), partial_c_(l, 0) {
    if (l < 1 || m < 0 || r < 0) throw std::invalid_argument("StreamEncoder: bad dimensions");
}

void StreamEncoder::step(std::span<const double> b_col, double q_i) {
    if (i_ >= m_) throw std::logic_error("StreamEncoder: all measurements already consumed");
    if (static_cast<int>(b_col.size()) != l_)
        throw std::invalid_argument("StreamEncoder: column length mismatch");
    std::int64_t v = to_lattice(q_i, alphabet_);
    if (mode_ == Mode::noise_shaped) {
        for (int j = 0; j < r_; ++j) {
            sums_[j] = checked_add(sums_[j], v);
            v = sums_[j];
        }
    }
    for (int i = 0; i < l_; ++i)
        partial_c_[i] = checked_add(partial_c_[i], b_col[i] > 0 ? v : -v);
    ++i_;
}

Codeword StreamEncoder::finalize() const {
    Codeword c;
    c.l = l_;
    c.m = m_;
    c.r = mode_ == Mode::noise_shaped ? r_ : 0;
    c.levels = alphabet_.levels;
    c.delta = alphabet_.delta;
    c.rate_bits = bitrate(c.l, std::max(c.m, 1), c.r, c.levels);
    c.lattice_ints = partial_c_;
    fill_values(c);
    return c;
}

DenseMatrix encoder_matrix(MatView b, int r) {
    DenseMatrix w(b.rows, b.cols);
    for (int i = 0; i < b.rows; ++i) {
        const double* bi = b.row(i);
        double* wi = w.a.data() + static_cast<std::size_t>(i) * b.cols;
        std::copy(bi, bi + b.cols, wi);
        kernels::suffix_sums(std::span<double>(wi, b.cols), r);
    }
    return w;
}

namespace {

constexpr char kMagic[4] = {'A', 'I', 'C', 'C'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
    // little-endian, fixed width
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T take(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    if (pos + sizeof(T) > bytes.size()) throw FormatError("codeword: truncated stream");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += sizeof(T);
    return static_cast<T>(v);
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    if (s.size() > 0xFFFF) throw FormatError("codeword: string field too long");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::string take_string(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    const auto n = take<std::uint16_t>(bytes, pos);
    if (pos + n > bytes.size()) throw FormatError("codeword: truncated string");
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
}

void put_rng(std::vector<std::uint8_t>& out, const RngSpec& r) {
    put<std::uint64_t>(out, r.seed);
    put_string(out, r.generator_id);
}

RngSpec take_rng(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    RngSpec r;
    r.seed = take<std::uint64_t>(bytes, pos);
    r.generator_id = take_string(bytes, pos);
    return r;
}

}  // namespace

std::vector<std::uint8_t> serialize_codeword(const Codeword& c) {
    // Documented bound on the lattice range: m^{r+1} (2K - 1). If the bound
    // itself cannot be held in 63 bits, or an entry escapes it, refuse.
    __int128 bound = 2 * c.levels - 1;
    for (int t = 0; t < c.r + 1; ++t) {
        bound *= c.m;
        if (bound > std::numeric_limits<std::int64_t>::max())
            throw FormatError("codeword: lattice range overflows 63-bit storage");
    }
    for (std::int64_t v : c.lattice_ints)
        if (v > static_cast<std::int64_t>(bound) || v < -static_cast<std::int64_t>(bound))
            throw FormatError("codeword: lattice integer outside the documented bound");

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put<std::uint16_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.l));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.m));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.r));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.levels));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c.delta);
    put_string(out, buf);
    put_rng(out, c.phi_seed);
    put_rng(out, c.b_seed);
    for (std::int64_t v : c.lattice_ints) put<std::int64_t>(out, v);
    return out;
}

Codeword deserialize_codeword(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("codeword: bad magic");
    pos = 4;
    if (take<std::uint16_t>(bytes, pos) != kVersion) throw FormatError("codeword: unsupported version");
    Codeword c;
    c.l = static_cast<int>(take<std::uint32_t>(bytes, pos));
    c.m = static_cast<int>(take<std::uint32_t>(bytes, pos));
    c.r = static_cast<int>(take<std::uint32_t>(bytes, pos));
    c.levels = static_cast<int>(take<std::uint32_t>(bytes, pos));
    const std::string dstr = take_string(bytes, pos);
    char* end = nullptr;
    c.delta = std::strtod(dstr.c_str(), &end);
    if (end == dstr.c_str() || c.delta <= 0.0) throw FormatError("codeword: bad delta field");
    c.phi_seed = take_rng(bytes, pos);
    c.b_seed = take_rng(bytes, pos);
    if (c.l < 1) throw FormatError("codeword: bad dimensions");
    c.lattice_ints.resize(c.l);
    for (int i = 0; i < c.l; ++i) c.lattice_ints[i] = take<std::int64_t>(bytes, pos);
    if (pos != bytes.size()) throw FormatError("codeword: trailing bytes");
    c.rate_bits = bitrate(c.l, std::max(c.m, 1), c.r, c.levels);
    fill_values(c);
    return c;
}

}  // namespace aic
