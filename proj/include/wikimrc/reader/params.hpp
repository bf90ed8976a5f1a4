#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wikimrc/util/error.hpp"

namespace wikimrc::reader {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Named parameter blocks in a fixed order. Vectors are 1 x n blocks.
template <typename T>
class ParamSet {
 public:
  struct Block {
    std::string name;
    Mat<T> value;
  };

  std::size_t add(const std::string &name, std::size_t rows, std::size_t cols) {
    if (index_.count(name)) throw DataError("duplicate parameter block " + name);
    index_[name] = blocks_.size();
    blocks_.push_back(Block{name, Mat<T>::Zero(static_cast<Eigen::Index>(rows),
                                               static_cast<Eigen::Index>(cols))});
    return blocks_.size() - 1;
  }

  Mat<T> &operator[](std::size_t i) { return blocks_[i].value; }
  const Mat<T> &operator[](std::size_t i) const { return blocks_[i].value; }

  std::size_t index_of(const std::string &name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError("missing parameter block " + name);
    return it->second;
  }

  std::vector<Block> &blocks() { return blocks_; }
  const std::vector<Block> &blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto &b : blocks_) n += static_cast<std::size_t>(b.value.size());
    return n;
  }

  // Same names and shapes, all zero.
  ParamSet zeros_like() const {
    ParamSet z;
    for (const auto &b : blocks_) {
      z.add(b.name, static_cast<std::size_t>(b.value.rows()), static_cast<std::size_t>(b.value.cols()));
    }
    return z;
  }

  void set_zero() {
    for (auto &b : blocks_) b.value.setZero();
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto &b : blocks_) {
      const std::size_t i = out.add(b.name, static_cast<std::size_t>(b.value.rows()),
                                    static_cast<std::size_t>(b.value.cols()));
      out[i] = b.value.template cast<U>();
    }
    return out;
  }

 private:
  std::vector<Block> blocks_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace wikimrc::reader
