#pragma once

// Generator for the twenty bAbI-style question answering task families,
// written from the published task descriptions. Used to build training and
// test files when the original corpus is not at hand; the output is ordinary
// story-format text and parses with corpus::parse_babi.

#include <cstddef>
#include <cstdint>
#include <string>

namespace ltmn::babi {

inline constexpr int kNumTasks = 20;

// Short task name, e.g. "single-supporting-fact" for task 1.
const char* task_name(int task);

// Stories for `task` (1..20) containing exactly `n_questions` questions.
// Deterministic in (task, n_questions, seed).
std::string generate_task(int task, std::size_t n_questions, std::uint64_t seed);

// Generator seed for the "train" or "test" file of a corpus seeded with `seed`.
std::uint64_t split_seed(std::uint64_t seed, const std::string& split);

// File name in the original naming scheme, e.g. "qa1_single-supporting-fact_train.txt".
std::string task_file_name(int task, const std::string& split);

}  // namespace ltmn::babi
