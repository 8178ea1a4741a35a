#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "critscat/io/state_dump.hpp"
#include "critscat/scattering/cauchy.hpp"

namespace critscat::io {

/// flock on a lock file; shared for readers, exclusive for writers.
class FileLock {
 public:
  FileLock(const std::filesystem::path& p, bool exclusive) {
    fd_ = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    require(fd_ >= 0, ErrorCode::IoError, "cannot open lock file " + p.string());
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::IoError, "flock failed on " + p.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

/**
 * Checkpoint cache in a directory: one state dump per (key, tau_from, tau_to), where key
 * hashes everything upstream of the evolution. Writes go to a temporary file and are
 * renamed into place under the exclusive lock.
 */
class FileCheckpointStore : public CheckpointStore {
 public:
  FileCheckpointStore(std::filesystem::path dir, std::string key) : dir_(std::move(dir)), key_(std::move(key)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<EvolutionState> load(double tau_from, double tau_to) override {
    const auto p = path(tau_from, tau_to);
    FileLock lock(dir_ / ".lock", false);
    if (!std::filesystem::exists(p)) return std::nullopt;
    try {
      auto r = read_state(p);
      if (r.tau_from != tau_from || r.state.tau != tau_to) return std::nullopt;
      ++hits_;
      return std::move(r.state);
    } catch (const Error&) {
      return std::nullopt;  // unreadable entry: recompute and overwrite
    }
  }

  void store(double tau_from, double tau_to, const EvolutionState& s) override {
    const auto p = path(tau_from, tau_to);
    const auto tmp = p.string() + "." + std::to_string(::getpid()) + "." + std::to_string(counter()++) + ".tmp";
    write_state(tmp, {s, tau_from});
    FileLock lock(dir_ / ".lock", true);
    std::filesystem::rename(tmp, p);
    ++stores_;
  }

  std::filesystem::path path(double tau_from, double tau_to) const {
    return dir_ / (key_ + "_" + format_double(tau_from) + "_" + format_double(tau_to) + ".state");
  }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t stores() const noexcept { return stores_; }

 private:
  static std::atomic<std::uint64_t>& counter() {
    static std::atomic<std::uint64_t> c{0};
    return c;
  }

  std::filesystem::path dir_;
  std::string key_;
  std::size_t hits_ = 0, stores_ = 0;
};

}  // namespace critscat::io
