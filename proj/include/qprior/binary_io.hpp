// Copyright 2026 The qprior Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian byte buffers shared by the pool and latent file formats.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "qprior/errors.hpp"

namespace qprior::io {

inline void write_file(const std::string &path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw IoError("write failed: '" + path + "'");
    }
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Writer {
  public:
    void bytes(std::string_view data) { buffer_.append(data); }

    template <typename T>
    void put(T value) {
        static_assert(std::is_arithmetic_v<T>);
        if constexpr (std::is_floating_point_v<T>) {
            using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
            put(std::bit_cast<Bits>(value));
        } else {
            using U = std::make_unsigned_t<T>;
            auto u = static_cast<U>(value);
            for (std::size_t i = 0; i < sizeof(T); ++i) {
                buffer_.push_back(static_cast<char>(u & 0xFFU));
                if constexpr (sizeof(T) > 1) {
                    u = static_cast<U>(u >> 8);
                }
            }
        }
    }

    template <typename T>
    void put_all(std::span<const T> values) {
        if constexpr (std::endian::native == std::endian::little &&
                      std::is_integral_v<T>) {
            buffer_.append(reinterpret_cast<const char *>(values.data()),
                           values.size_bytes());
        } else {
            for (const auto &v : values) {
                put(v);
            }
        }
    }

    [[nodiscard]] const std::string &data() const noexcept { return buffer_; }

  private:
    std::string buffer_;
};

class Reader {
  public:
    explicit Reader(std::string data, std::string what)
        : data_(std::move(data)), what_(std::move(what)) {}

    [[nodiscard]] std::size_t remaining() const noexcept {
        return data_.size() - offset_;
    }

    std::string_view bytes(std::size_t n, const char *field) {
        if (remaining() < n) {
            throw FormatError(what_ + ": header truncated while reading " + field);
        }
        std::string_view out(data_.data() + offset_, n);
        offset_ += n;
        return out;
    }

    template <typename T>
    T get(const char *field) {
        static_assert(std::is_arithmetic_v<T>);
        if constexpr (std::is_floating_point_v<T>) {
            using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
            return std::bit_cast<T>(get<Bits>(field));
        } else {
            const auto raw = bytes(sizeof(T), field);
            using U = std::make_unsigned_t<T>;
            U value = 0;
            for (std::size_t i = sizeof(T); i-- > 0;) {
                if constexpr (sizeof(T) > 1) {
                    value = static_cast<U>(value << 8);
                }
                value = static_cast<U>(value | static_cast<std::uint8_t>(raw[i]));
            }
            return static_cast<T>(value);
        }
    }

    /// Reads `count` values; callers check `remaining()` first to report
    /// truncation in their own terms.
    template <typename T>
    void get_all(std::span<T> out) {
        if constexpr (std::endian::native == std::endian::little &&
                      std::is_integral_v<T>) {
            const auto raw = bytes(out.size_bytes(), "payload");
            std::memcpy(out.data(), raw.data(), raw.size());
        } else {
            for (auto &v : out) {
                v = get<T>("payload");
            }
        }
    }

  private:
    std::string data_;
    std::string what_;
    std::size_t offset_ = 0;
};

}  // namespace qprior::io
