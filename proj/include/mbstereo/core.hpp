#ifndef MBSTEREO_CORE_HPP
#define MBSTEREO_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mbstereo {

/// Raised for malformed arguments, mismatched dimensions and violated preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read, written or decoded.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major 2-D grid of values.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 0 || h < 0) throw InvalidArgument("Grid: negative dimension");
    }

    std::size_t size() const { return data.size(); }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    T& operator()(int x, int y) { return data[index(x, y)]; }
    const T& operator()(int x, int y) const { return data[index(x, y)]; }
    bool same_shape(int w, int h) const { return width == w && height == h; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Per-pixel boolean stored as bytes (0 or 1).
using Mask = Grid<std::uint8_t>;

/// Planar-interleaved float image, samples nominally in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w < 0 || h < 0) throw InvalidArgument("Image: negative dimension");
        if (c != 1 && c != 3) throw InvalidArgument("Image: channels must be 1 or 3");
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Horizontal disparity for the left view in left-image pixels.
/// Invalid pixels carry value 0 and valid = 0.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;
    std::vector<std::uint8_t> valid;

    DisparityMap() = default;
    DisparityMap(int w, int h, float fill = 0.0f, bool is_valid = true)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h, fill),
          valid(static_cast<std::size_t>(w) * h, is_valid ? 1 : 0) {
        if (w < 0 || h < 0) throw InvalidArgument("DisparityMap: negative dimension");
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    float value(int x, int y) const { return values[index(x, y)]; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    void set(int x, int y, float d) {
        values[index(x, y)] = d;
        valid[index(x, y)] = 1;
    }
    void invalidate(int x, int y) {
        values[index(x, y)] = 0.0f;
        valid[index(x, y)] = 0;
    }

    friend bool operator==(const DisparityMap&, const DisparityMap&) = default;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw InvalidArgument(msg);
}

inline void require_same_shape(const Image& a, const Image& b, const char* who) {
    if (!a.same_shape(b)) throw InvalidArgument(std::string(who) + ": image dimension mismatch");
}

inline void require_same_shape(const Image& a, const DisparityMap& d, const char* who) {
    if (a.width != d.width || a.height != d.height)
        throw InvalidArgument(std::string(who) + ": disparity/image dimension mismatch");
}

/// Nearest integer with halves rounded up; shared by every nearest-abscissa lookup.
inline long round_half_up(double v) { return static_cast<long>(std::floor(v + 0.5)); }

/// Mirror an index into [0, n) without repeating the edge sample (-1 -> 1, n -> n-2).
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

/// Channel-averaged grayscale copy (identity for single-channel inputs).
inline Image to_gray(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double s = 0.0;
            for (int c = 0; c < img.channels; ++c) s += img.at(x, y, c);
            out.at(x, y) = static_cast<float>(s / img.channels);
        }
    return out;
}

/// Worker count: MBSTEREO_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("MBSTEREO_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Each index is visited exactly once;
/// callers write disjoint outputs, so results never depend on scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = static_cast<int>(std::min<unsigned>(thread_count(), n > 0 ? n : 1));
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int b = w * chunk;
        const int e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
}

}  // namespace mbstereo

#endif
