#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace seqjde {

// Values over the trellis {(m0, m1) : m0 + m1 <= m_bar}, stored by
// anti-diagonal m = m0 + m1 and, within a diagonal, by increasing m1.
template <class T>
class Triangle {
public:
    Triangle() = default;
    Triangle(int m_bar, T fill) : m_bar_(m_bar), data_(size_for(m_bar), fill) {}

    static std::size_t size_for(int m_bar) {
        const auto n = static_cast<std::size_t>(m_bar) + 1;
        return n * (n + 1) / 2;
    }

    static std::size_t index(int m0, int m1) {
        const auto m = static_cast<std::size_t>(m0 + m1);
        return m * (m + 1) / 2 + static_cast<std::size_t>(m1);
    }

    T& operator()(int m0, int m1) {
        assert(m0 >= 0 && m1 >= 0 && m0 + m1 <= m_bar_);
        return data_[index(m0, m1)];
    }
    const T& operator()(int m0, int m1) const {
        assert(m0 >= 0 && m1 >= 0 && m0 + m1 <= m_bar_);
        return data_[index(m0, m1)];
    }

    int m_bar() const noexcept { return m_bar_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    // Row-major anti-diagonal order.
    const std::vector<T>& data() const noexcept { return data_; }
    std::vector<T>& data() noexcept { return data_; }

private:
    int m_bar_ = -1;
    std::vector<T> data_;
};

}  // namespace seqjde
