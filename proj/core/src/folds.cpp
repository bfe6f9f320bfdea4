#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/fedcore.hpp"

namespace radfed::fed {

std::vector<FoldSplit> make_folds(std::span<const std::size_t> ids, std::size_t n_folds,
                                  std::uint64_t seed, bool nested) {
    if (n_folds < 2) {
        throw ParameterError("at least 2 folds are required");
    }
    if (ids.size() < n_folds) {
        throw ParameterError(fmt::format("{} clients cannot fill {} folds", ids.size(), n_folds));
    }
    std::vector<std::size_t> order(ids.begin(), ids.end());
    Rng rng = make_rng(seed, {tag("folds")});
    shuffle(std::span<std::size_t>(order), rng);

    std::vector<std::vector<std::size_t>> folds(n_folds);
    const std::size_t base = order.size() / n_folds;
    const std::size_t extra = order.size() % n_folds;
    std::size_t next = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                        order.begin() + static_cast<std::ptrdiff_t>(next + len));
        std::sort(folds[f].begin(), folds[f].end());
        next += len;
    }

    std::vector<FoldSplit> splits;
    for (std::size_t f = 0; f < n_folds; ++f) {
        std::vector<std::size_t> validation_folds;
        if (nested) {
            for (std::size_t v = 0; v < n_folds; ++v) {
                if (v != f) {
                    validation_folds.push_back(v);
                }
            }
        } else {
            validation_folds.push_back((f + 1) % n_folds);
        }
        for (std::size_t v : validation_folds) {
            FoldSplit split;
            split.test_fold = f;
            split.validation_fold = v;
            split.test = folds[f];
            split.validation = folds[v];
            for (std::size_t k = 0; k < n_folds; ++k) {
                if (k != f && k != v) {
                    split.train.insert(split.train.end(), folds[k].begin(), folds[k].end());
                }
            }
            std::sort(split.train.begin(), split.train.end());
            splits.push_back(std::move(split));
        }
    }
    return splits;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    // One slot per index so the reported failure does not depend on scheduling.
    std::vector<std::exception_ptr> failures(n);
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const std::size_t count = std::min(workers, n);
    for (std::size_t t = 0; t < count; ++t) {
        threads.emplace_back(body);
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
}

}  // namespace radfed::fed
