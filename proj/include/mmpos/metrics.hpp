#pragma once

#include <string>
#include <vector>

#include "mmpos/geometry.hpp"

namespace mmpos {

// max over a in A of min over b in B of ||a - b||; pruned by a uniform
// spatial hash but exactly equal to the brute-force double loop.
double directed_hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Reference O(|A||B|) evaluation, kept for equivalence testing.
double directed_hausdorff_brute(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Symmetric Hausdorff distance: max of the two directed values.
double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct SweepRow {
    double parameter = 0.0;
    double hausdorff = 0.0;
    double directed = 0.0;
};

struct SweepStats {
    double parameter = 0.0;
    double mean_hausdorff = 0.0;
    double std_hausdorff = 0.0;
    double mean_directed = 0.0;
    double std_directed = 0.0;
};

// Per-parameter mean and sample standard deviation over seeds.
std::vector<SweepStats> sweep_stats(const std::vector<SweepRow>& rows);

// CSV rendering with the fixed header
// "param,mean_hausdorff,std_hausdorff,mean_directed,std_directed".
std::string sweep_csv(const std::vector<SweepStats>& stats);

}  // namespace mmpos
