#pragma once

#include <cstdint>
#include <vector>

#include "htf/experiments.hpp"

namespace htf::detail {

struct SuiteDef {
    const char* name;
    SuiteKind kind;
    void (*run)(const RunConfig&, std::uint64_t seed, SuiteResult&);
};

const std::vector<SuiteDef>& suite_registry();

// FNV-1a, used to derive per-suite seeds from names
std::uint64_t name_hash(const char* s);

}  // namespace htf::detail
