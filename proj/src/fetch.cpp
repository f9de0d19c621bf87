#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include <httplib.h>
#include <json.hpp>

#include "fmdgt/experiment.hpp"
#include "fmdgt/graph.hpp"

namespace fs = std::filesystem;

namespace fmdgt {

namespace {

struct DatasetInfo {
    const char* host;
    const char* path;
    const char* filename;       // cached decompressed name
    long long expected_nodes;   // published graph size
    long long expected_events;  // published temporal edge count
};

const DatasetInfo* dataset_info(const std::string& name) {
    static const DatasetInfo message{"http://snap.stanford.edu", "/data/CollegeMsg.txt.gz",
                                     "CollegeMsg.txt", 1899, 59835};
    static const DatasetInfo mail{"http://snap.stanford.edu", "/data/email-Eu-core-temporal.txt.gz",
                                  "email-Eu-core-temporal.txt", 986, 332334};
    if (name == "message") return &message;
    if (name == "mail") return &mail;
    return nullptr;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

namespace detail {

std::string gunzip(const std::string& compressed) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK)  // accept gzip or zlib headers
        throw std::runtime_error("inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    zs.avail_in = static_cast<uInt>(compressed.size());
    std::string out;
    char buf[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("gzip inflate failed");
        }
        out.append(buf, sizeof(buf) - zs.avail_out);
    }
    inflateEnd(&zs);
    return out;
}

}  // namespace detail

namespace {

void validate_content(const DatasetInfo& info, const std::string& text) {
    RawEventLog log;
    {
        std::istringstream is(text);
        log = parse_temporal_edges(is);
    }
    if (static_cast<long long>(log.events.size()) != info.expected_events)
        throw std::runtime_error("dataset validation failed: expected " +
                                 std::to_string(info.expected_events) + " events, got " +
                                 std::to_string(log.events.size()));
    CommGraph g = build_comm_graph(log);
    if (g.node_count != info.expected_nodes)
        throw std::runtime_error("dataset validation failed: expected " +
                                 std::to_string(info.expected_nodes) + " nodes, got " +
                                 std::to_string(g.node_count));
}

std::string read_all(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

std::string fetch_dataset(const std::string& name, const std::string& cache_dir, bool offline) {
    const DatasetInfo* info = dataset_info(name);
    if (!info) throw std::invalid_argument("unknown dataset name: " + name +
                                           " (expected \"message\" or \"mail\")");
    fs::path dir(cache_dir);
    fs::path cached = dir / info->filename;
    fs::path meta = dir / (std::string(info->filename) + ".meta.json");

    if (fs::exists(cached)) {
        std::string text = read_all(cached);
        if (fs::exists(meta)) {
            nlohmann::json m = nlohmann::json::parse(read_all(meta));
            if (m.value("bytes", -1LL) != static_cast<long long>(text.size()) ||
                m.value("fnv1a", std::string()) != std::to_string(fnv1a(text)))
                throw std::runtime_error("cached dataset failed checksum: " + cached.string());
        } else {
            nlohmann::json m{{"bytes", text.size()}, {"fnv1a", std::to_string(fnv1a(text))}};
            std::ofstream(meta) << m.dump(2);
        }
        return cached.string();
    }
    if (offline) throw std::runtime_error("dataset not cached and offline mode is on: " + name);

    httplib::Client cli(info->host);
    cli.set_follow_location(true);
    cli.set_connection_timeout(30);
    cli.set_read_timeout(120);
    auto res = cli.Get(info->path);
    if (!res || res->status != 200)
        throw std::runtime_error("download failed for " + std::string(info->host) + info->path +
                                 (res ? " (http " + std::to_string(res->status) + ")"
                                      : " (no response)"));
    if (res->body.empty()) throw std::runtime_error("downloaded file is empty");
    std::string text = detail::gunzip(res->body);
    validate_content(*info, text);

    fs::create_directories(dir);
    std::ofstream(cached, std::ios::binary) << text;
    nlohmann::json m{{"bytes", text.size()}, {"fnv1a", std::to_string(fnv1a(text))}};
    std::ofstream(meta) << m.dump(2);
    return cached.string();
}

}  // namespace fmdgt
