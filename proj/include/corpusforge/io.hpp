#pragma once

#include <glob.h>
#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

inline bool is_gzip_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in.gcount() == 2 && static_cast<unsigned char>(magic[0]) == 0x1F &&
           static_cast<unsigned char>(magic[1]) == 0x8B;
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_gzip_bytes(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open gzip file: " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<size_t>(n));
    int err = 0;
    gzerror(f, &err);
    gzclose(f);
    if (n < 0 || err != Z_OK) throw std::runtime_error("gzip read failed: " + path);
    return out;
}

// Reads a file transparently, inflating when the gzip magic is present.
inline std::string read_maybe_gzip(const std::string& path) {
    return is_gzip_file(path) ? read_gzip_bytes(path) : read_file_bytes(path);
}

inline void write_file_bytes(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Calls fn(line) for each '\n'-terminated line; a final unterminated line is
// delivered too. Lines exclude the newline.
inline void for_each_line(std::string_view bytes, const std::function<void(std::string_view)>& fn) {
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) {
            fn(bytes.substr(pos));
            break;
        }
        fn(bytes.substr(pos, nl - pos));
        pos = nl + 1;
    }
}

// Shell-style glob expansion; a pattern without metacharacters passes
// through if the path exists. Results are sorted.
inline std::vector<std::string> glob_paths(const std::string& pattern) {
    std::vector<std::string> out;
    glob_t g{};
    int rc = ::glob(pattern.c_str(), GLOB_TILDE, nullptr, &g);
    if (rc == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    } else if (rc != GLOB_NOMATCH) {
        globfree(&g);
        throw std::runtime_error("glob failed for pattern: " + pattern);
    }
    globfree(&g);
    return out;
}

// Writer that lands output under NAME.partial and renames to NAME on
// commit(). Anything left behind after a crash is visibly partial.
class AtomicFileWriter {
public:
    explicit AtomicFileWriter(std::string path)
        : path_(std::move(path)), tmp_path_(path_ + ".partial"), out_(tmp_path_, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot write file: " + tmp_path_);
    }

    ~AtomicFileWriter() {
        if (!committed_) out_.close();
    }

    void write(std::string_view bytes) {
        out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out_) throw std::runtime_error("write failed: " + tmp_path_);
    }

    void commit() {
        out_.flush();
        out_.close();
        if (!out_) throw std::runtime_error("flush failed: " + tmp_path_);
        std::filesystem::rename(tmp_path_, path_);
        committed_ = true;
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string tmp_path_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace corpusforge
