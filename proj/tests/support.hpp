#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "radfed/data.hpp"
#include "radfed/fedcore.hpp"
#include "radfed/model.hpp"

namespace radfed::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("radfed_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Client with the given rows of (features..., label).
inline data::ClientDataset make_client(int id, const std::vector<std::vector<double>>& x,
                                       const std::vector<int>& y, std::size_t classes = 2) {
    data::ClientDataset c;
    c.id = id;
    for (const auto& row : x) {
        c.features.push_row(std::span<const double>(row));
    }
    c.labels = y;
    c.num_numeric = x.empty() ? 0 : x.front().size();
    c.class_counts.assign(classes, 0);
    for (int label : y) {
        ++c.class_counts[static_cast<std::size_t>(label)];
    }
    for (std::size_t r = 0; r < y.size(); ++r) {
        c.source_rows.push_back(r);
    }
    return c;
}

inline std::vector<const fed::ClientEndpoint*> endpoints_of(
    const std::vector<fed::LocalClient>& clients) {
    std::vector<const fed::ClientEndpoint*> out;
    for (const auto& c : clients) {
        out.push_back(&c);
    }
    return out;
}

}  // namespace radfed::testing
