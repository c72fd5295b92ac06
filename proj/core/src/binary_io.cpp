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

#include "vise/io/binary.hpp"

#include <cstdio>
#include <memory>

namespace vise::io {

namespace {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

std::vector<uint8_t> read_file(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error("cannot open for read: " + path);
  std::fseek(f.get(), 0, SEEK_END);
  const long size = std::ftell(f.get());
  if (size < 0) throw Error("cannot stat: " + path);
  std::fseek(f.get(), 0, SEEK_SET);
  std::vector<uint8_t> bytes(static_cast<size_t>(size));
  if (size > 0 && std::fread(bytes.data(), 1, bytes.size(), f.get()) !=
                      bytes.size()) {
    throw Error("short read: " + path);
  }
  return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error("cannot open for write: " + path);
  if (!bytes.empty() &&
      std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw Error("short write: " + path);
  }
}

FileSink::FileSink(const std::string& path)
    : file_(std::fopen(path.c_str(), "wb")) {
  if (!file_) throw Error("cannot open for write: " + path);
}

FileSink::~FileSink() {
  if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

void FileSink::write(const void* data, size_t n) {
  if (n == 0) return;
  if (std::fwrite(data, 1, n, static_cast<std::FILE*>(file_)) != n) {
    throw Error("short write to file sink");
  }
}

FileSource::FileSource(const std::string& path)
    : file_(std::fopen(path.c_str(), "rb")) {
  if (!file_) throw Error("cannot open for read: " + path);
  auto* f = static_cast<std::FILE*>(file_);
  std::fseek(f, 0, SEEK_END);
  const long size = std::ftell(f);
  if (size < 0) throw Error("cannot stat: " + path);
  std::fseek(f, 0, SEEK_SET);
  size_ = static_cast<size_t>(size);
}

FileSource::~FileSource() {
  if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

void FileSource::read(void* out, size_t n) {
  if (n == 0) return;
  if (pos_ + n > size_) throw CorruptIndexError("truncated input file");
  if (std::fread(out, 1, n, static_cast<std::FILE*>(file_)) != n) {
    throw Error("short read from file source");
  }
  pos_ += n;
}

}  // namespace vise::io
