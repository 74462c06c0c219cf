#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "valdet/systems.hpp"

namespace valdet {

struct Word {
    std::vector<uint8_t> letters;  // branch indices, length n >= 1
    int length() const { return (int)letters.size(); }
};

// One verified periodic orbit: the fixed point of the word's contraction
// composition psi_w = psi_{i1} o ... o psi_{in}.
struct OrbitRecord {
    Word word;
    Interval fixed_point;       // verified: the composition maps it into itself
    Interval orbit_derivative;  // psi_w'(x_w) = product of branch derivatives
    Interval sum_points;        // sum of the n orbit points (for observables)
};

struct OrbitTable {
    int max_period = 0;
    std::vector<std::vector<OrbitRecord>> records;  // records[n-1], lex order
    Interval eps1;      // max enclosure-width contribution to a trace term
    std::string metadata;

    const std::vector<OrbitRecord>& period(int n) const {
        return records[(size_t)n - 1];
    }
    size_t total() const {
        size_t t = 0;
        for (auto& v : records) t += v.size();
        return t;
    }
};

// All admissible words of length n in lexicographic order.  With a Markov
// matrix present, consecutive letters (cyclically) must be admissible.
std::vector<Word> enumerate_words(const SystemSpec& sys, int n);

// Verified fixed point of one word (point Newton + interval-Newton step).
OrbitRecord fixed_point(const SystemSpec& sys, const Word& w);

// Deterministic streaming enumeration of all admissible words of length
// 1..N.  Per period, records are delivered in lexicographic word order
// independent of the thread count: chunk boundaries depend only on the
// system and N, chunks are merged in a fixed order.
class OrbitAccumulator {
public:
    virtual ~OrbitAccumulator() = default;
    virtual void on_record(int period, const OrbitRecord& rec) = 0;
    // `other` is a later chunk of the same dynamic type; append its state.
    virtual void absorb(OrbitAccumulator& other) = 0;
};

struct FoldOptions {
    unsigned threads = 1;
    bool need_orbit_sum = false;  // populate OrbitRecord::sum_points
};

void fold_orbits(const SystemSpec& sys, int N, const FoldOptions& opt,
                 const std::function<std::unique_ptr<OrbitAccumulator>()>& make_chunk,
                 OrbitAccumulator& root);

// All periods 1..N, materialized.  Built on fold_orbits.
OrbitTable build_orbit_table(const SystemSpec& sys, int N, unsigned threads = 1);

} // namespace valdet
