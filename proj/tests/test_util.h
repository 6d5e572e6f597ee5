// Copyright 2026 The revmatch Authors.
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


#ifndef REVMATCH_TESTS_TEST_UTIL_H_
#define REVMATCH_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "revmatch/dataset.h"
#include "revmatch/random.h"

namespace revmatch::testing {

// Small fully-specified dataset: every reviewer rates every paper, each
// paper has two distinct categories, abstracts share words so similarities
// are non-trivial, and reviewers 0 and 1 are co-authors.
inline Dataset TinyDataset(int m, int n, int k, std::uint64_t seed,
                           bool full = true) {
  Rng rng(seed);
  std::uniform_int_distribution<int> rating(1, 4);
  std::uniform_int_distribution<int> cat(0, k - 1);
  Dataset data;
  for (int u = 0; u < m; ++u) data.reviewers.Intern("r" + std::to_string(u));
  for (int i = 0; i < n; ++i) data.papers.Intern("p" + std::to_string(i));
  for (int c = 0; c < k; ++c) data.categories.Intern("c" + std::to_string(c));
  data.annotations.primary.resize(n);
  data.annotations.secondary.resize(n);
  for (int i = 0; i < n; ++i) {
    const int a = cat(rng);
    int b = cat(rng);
    while (b == a) b = cat(rng);
    data.annotations.primary[i] = CategoryId(a);
    data.annotations.secondary[i] = CategoryId(b);
  }
  data.annotations.interest.assign(m, {});
  data.annotations.conflict.assign(m, {});
  for (int u = 0; u < m; ++u) {
    for (int c = 0; c < k; ++c) {
      const int draw = std::uniform_int_distribution<int>(0, 2)(rng);
      if (draw == 1) data.annotations.interest[u].push_back(CategoryId(c));
      if (draw == 2) data.annotations.conflict[u].push_back(CategoryId(c));
    }
  }
  const char* words[] = {"graph", "kernel", "bayesian", "mining", "stream",
                         "cluster", "matrix", "privacy"};
  data.corpus.abstracts.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string text;
    for (int w = 0; w < 6; ++w) {
      text += words[std::uniform_int_distribution<int>(0, 7)(rng)];
      text += ' ';
    }
    data.corpus.abstracts[i] = text;
  }
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < n; ++i) {
      if (!full && std::uniform_int_distribution<int>(0, 2)(rng) == 0) continue;
      data.bids.push_back({ReviewerId(u), PaperId(i), rating(rng)});
    }
  }
  data.coauthors.Resize(m);
  if (m >= 2) data.coauthors.Add(ReviewerId(0), ReviewerId(1), 2);
  if (m >= 3) data.coauthors.Add(ReviewerId(1), ReviewerId(2), 1);
  return data;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("revmatch_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void WriteText(const std::filesystem::path& path,
                      const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace revmatch::testing

#endif  // REVMATCH_TESTS_TEST_UTIL_H_
