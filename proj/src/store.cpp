#include "uniclass/store.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "io_util.hpp"
#include "uniclass/error.hpp"

namespace uniclass {

static_assert(std::endian::native == std::endian::little, "store I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace {

class Writer {
public:
    void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    template <typename T>
    void pod(T v) { bytes(&v, sizeof v); }
    void str16(const std::string& s, const char* what) {
        if (s.size() > 0xFFFF) throw DataError(std::string(what) + " longer than 65535 bytes");
        pod(static_cast<std::uint16_t>(s.size()));
        bytes(s.data(), s.size());
    }
    const std::string& buffer() const noexcept { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(const std::vector<char>& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

    std::size_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n) {
            throw CorruptStoreError(path_, pos_, std::string("truncated while reading ") + what);
        }
    }
    template <typename T>
    T pod(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }
    std::string str16(const char* what) {
        const auto len = pod<std::uint16_t>(what);
        need(len, what);
        std::string s(bytes_.data() + pos_, len);
        pos_ += len;
        return s;
    }
    void skip(std::size_t n, const char* what) {
        need(n, what);
        pos_ += n;
    }

private:
    const std::vector<char>& bytes_;
    const std::string& path_;
    std::size_t pos_ = 0;
};

}  // namespace

void store_write(const std::filesystem::path& path, const EmbeddingMatrix& matrix) {
    std::unordered_set<std::string> seen;
    for (const auto& id : matrix.ids()) {
        if (!seen.insert(id).second) throw DataError("duplicate id '" + id + "' in store write");
    }
    Writer w;
    w.bytes(kStoreMagic, 4);
    w.pod(kStoreVersion);
    w.pod(static_cast<std::uint32_t>(matrix.dim()));
    w.pod(static_cast<std::uint64_t>(matrix.rows()));
    w.pod(static_cast<std::uint8_t>(matrix.normalized() ? 1 : 0));
    w.str16(matrix.model_name(), "model name");
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        w.str16(matrix.id(r), "sample id");
        const auto row = matrix.row(r);
        w.bytes(row.data(), row.size() * sizeof(float));
    }
    // Write to a sibling file and rename so readers never see a partial store.
    auto tmp = path;
    tmp += ".tmp";
    detail::write_file(tmp, w.buffer());
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

EmbeddingStore::EmbeddingStore(const std::filesystem::path& path) : path_(path) {
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open embedding store " + path.string());
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    const std::string name = path.string();
    Reader r(bytes_, name);
    r.need(4, "magic");
    if (std::memcmp(bytes_.data(), kStoreMagic, 4) != 0) throw CorruptStoreError(name, 0, "bad magic");
    r.skip(4, "magic");
    const auto version_offset = r.offset();
    const auto version = r.pod<std::uint16_t>("version");
    if (version != kStoreVersion) {
        throw CorruptStoreError(name, version_offset, "unsupported version " + std::to_string(version));
    }
    dim_ = r.pod<std::uint32_t>("dim");
    const auto count = r.pod<std::uint64_t>("count");
    const auto flag_offset = r.offset();
    const auto flag = r.pod<std::uint8_t>("normalized flag");
    if (flag > 1) throw CorruptStoreError(name, flag_offset, "normalized flag must be 0 or 1");
    normalized_ = flag == 1;
    model_name_ = r.str16("model name");

    const std::size_t payload = dim_ * sizeof(float);
    // Each record needs at least the id length prefix and the payload.
    if (count > (bytes_.size() - r.offset()) / (payload + 2)) {
        throw CorruptStoreError(name, r.offset(), "declared count " + std::to_string(count) + " exceeds file size");
    }
    ids_.reserve(count);
    index_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto record_offset = r.offset();
        std::string id = r.str16("record id");
        const auto data_offset = r.offset();
        r.skip(payload, "record payload");
        if (!index_.emplace(id, data_offset).second) {
            throw CorruptStoreError(name, record_offset, "duplicate id '" + id + "'");
        }
        ids_.push_back(std::move(id));
    }
    if (!r.at_end()) throw CorruptStoreError(name, r.offset(), "trailing bytes after last record");
}

bool EmbeddingStore::copy_row(const std::string& id, float* out) const {
    auto it = index_.find(id);
    if (it == index_.end()) return false;
    std::memcpy(out, bytes_.data() + it->second, dim_ * sizeof(float));
    return true;
}

EmbeddingMatrix EmbeddingStore::read_all() const { return read(ids_); }

EmbeddingMatrix EmbeddingStore::read(const std::vector<std::string>& ids) const {
    std::vector<float> data(ids.size() * dim_);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!copy_row(ids[i], data.data() + i * dim_)) missing.push_back(ids[i]);
    }
    if (!missing.empty()) throw DataError(path_.string() + ": " + describe_missing_ids(missing));
    return EmbeddingMatrix(ids, std::move(data), dim_, normalized_, model_name_);
}

EmbeddingMatrix store_read(const std::filesystem::path& path, const std::optional<std::vector<std::string>>& ids) {
    EmbeddingStore store(path);
    return ids ? store.read(*ids) : store.read_all();
}

std::string describe_missing_ids(const std::vector<std::string>& missing) {
    std::string out = std::to_string(missing.size()) + " id(s) missing from embedding store: ";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) out += ", ";
        out += missing[i];
    }
    if (missing.size() > shown) out += ", ...";
    return out;
}

}  // namespace uniclass
