// Copyright 2026 The Vise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VISE_IO_BINARY_HPP_
#define VISE_IO_BINARY_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "vise/errors.hpp"

namespace vise::io {

// Incremental FNV-1a (64 bit). Snapshot files carry this over their payload.
class Fnv64 {
 public:
  void update(const void* data, size_t n) {
    const auto* bytes = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  uint64_t digest() const { return hash_; }

 private:
  uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// Little-endian writer into an owned byte buffer. All on-disk formats and
// the deterministic serializations used by round-trip tests go through it.
class Writer {
 public:
  void u8(uint8_t v) { raw(&v, 1); }
  void u16(uint16_t v) {
    uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
    raw(b, 2);
  }
  void u32(uint32_t v) {
    uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    raw(b, 4);
  }
  void u64(uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    raw(b, 8);
  }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void raw(const void* data, size_t n) {
    const auto* bytes = static_cast<const uint8_t*>(data);
    buf_.insert(buf_.end(), bytes, bytes + n);
  }
  void magic(const char tag[4]) { raw(tag, 4); }

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

// Little-endian reader over a borrowed byte range. Throws CorruptIndexError
// on truncation; higher layers add format-specific context.
class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
  explicit Reader(const std::vector<uint8_t>& buf)
      : Reader(buf.data(), buf.size()) {}

  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    const uint8_t* b = take(2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint32_t u32() {
    const uint8_t* b = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    const uint8_t* b = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(void* out, size_t n) { std::memcpy(out, take(n), n); }
  void expect_magic(const char tag[4]) {
    const uint8_t* b = take(4);
    if (std::memcmp(b, tag, 4) != 0) {
      throw CorruptIndexError("bad magic, expected " + std::string(tag, 4));
    }
  }

  size_t offset() const { return pos_; }
  size_t remaining() const { return size_ - pos_; }

 private:
  const uint8_t* take(size_t n) {
    if (pos_ + n > size_) throw CorruptIndexError("truncated input");
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

// Whole-file helpers.
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

// Streaming byte sink, so multi-gigabyte snapshots serialize without a
// second in-memory copy.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void write(const void* data, size_t n) = 0;

  void u8(uint8_t v) { write(&v, 1); }
  void u32(uint32_t v) {
    uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    write(b, 4);
  }
  void u64(uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    write(b, 8);
  }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void magic(const char tag[4]) { write(tag, 4); }
};

class VectorSink : public Sink {
 public:
  void write(const void* data, size_t n) override {
    const auto* bytes = static_cast<const uint8_t*>(data);
    buf_.insert(buf_.end(), bytes, bytes + n);
  }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

// Forwards to an inner sink while hashing everything that passes through.
class HashingSink : public Sink {
 public:
  explicit HashingSink(Sink* inner) : inner_(inner) {}
  void write(const void* data, size_t n) override {
    hash_.update(data, n);
    if (inner_) inner_->write(data, n);
  }
  uint64_t digest() const { return hash_.digest(); }

 private:
  Sink* inner_;
  Fnv64 hash_;
};

class FileSink : public Sink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;
  void write(const void* data, size_t n) override;

 private:
  void* file_;  // std::FILE*
};

// Streaming byte source mirror of Sink.
class Source {
 public:
  virtual ~Source() = default;
  virtual void read(void* out, size_t n) = 0;

  uint8_t u8() {
    uint8_t v;
    read(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint8_t b[4];
    read(b, 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint8_t b[8];
    read(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_magic(const char tag[4]) {
    char b[4];
    read(b, 4);
    if (std::memcmp(b, tag, 4) != 0) {
      throw CorruptIndexError("bad magic, expected " + std::string(tag, 4));
    }
  }
};

class BufferSource : public Source {
 public:
  explicit BufferSource(const std::vector<uint8_t>& buf)
      : data_(buf.data()), size_(buf.size()) {}
  void read(void* out, size_t n) override {
    if (pos_ + n > size_) throw CorruptIndexError("truncated input");
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  size_t remaining() const { return size_ - pos_; }

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

class FileSource : public Source {
 public:
  explicit FileSource(const std::string& path);
  ~FileSource() override;
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;
  void read(void* out, size_t n) override;
  size_t remaining() const { return size_ - pos_; }

 private:
  void* file_;  // std::FILE*
  size_t size_ = 0;
  size_t pos_ = 0;
};

// Hashes bytes as they are pulled from an inner source.
class HashingSource : public Source {
 public:
  explicit HashingSource(Source* inner) : inner_(inner) {}
  void read(void* out, size_t n) override {
    inner_->read(out, n);
    hash_.update(out, n);
  }
  uint64_t digest() const { return hash_.digest(); }

 private:
  Source* inner_;
  Fnv64 hash_;
};

}  // namespace vise::io

#endif  // VISE_IO_BINARY_HPP_
