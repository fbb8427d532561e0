#pragma once

#include <string>
#include <vector>

#include "qread/bench.hpp"

namespace qread::fixtures {

// Resource-estimate tables: shot counts to two significant figures and the
// printed acceleration factors (ratios of the rounded shot columns, shown at
// one or two significant figures).
struct ShotTableRow {
    RegularityClass cls;
    int d;
    double eps;
    std::string method;
    double shots;        // rounded to 2 significant figures
    double accel;        // as printed
    int accel_sigfigs;   // precision of the printed acceleration
};

inline std::vector<ShotTableRow> shot_table_rows() {
    using RC = RegularityClass;
    return {
        // piecewise W11
        {RC::W11, 1, 0.01, "rsr", 1e6, 1.0, 2},
        {RC::W11, 1, 0.01, "arsr", 1e6, 1.0, 2},
        {RC::W11, 1, 0.01, "fsr", 1e8, 0.01, 1},
        {RC::W11, 1, 0.001, "rsr", 1e9, 1.0, 2},
        {RC::W11, 1, 0.001, "arsr", 1e9, 1.0, 2},
        {RC::W11, 1, 0.001, "fsr", 1e12, 0.001, 1},
        {RC::W11, 2, 0.01, "rsr", 1e8, 1.0, 2},
        {RC::W11, 2, 0.01, "arsr", 1e8, 1.0, 2},
        {RC::W11, 2, 0.01, "fsr", 4.6e8, 0.2, 1},
        {RC::W11, 2, 0.001, "rsr", 1e12, 1.0, 2},
        {RC::W11, 2, 0.001, "arsr", 1e12, 1.0, 2},
        {RC::W11, 2, 0.001, "fsr", 6.9e12, 0.1, 1},
        {RC::W11, 3, 0.01, "rsr", 1e10, 1.0, 2},
        {RC::W11, 3, 0.01, "arsr", 1e10, 1.0, 2},
        {RC::W11, 3, 0.01, "fsr", 2.1e9, 5.0, 1},
        {RC::W11, 3, 0.001, "rsr", 1e15, 1.0, 2},
        {RC::W11, 3, 0.001, "arsr", 1e15, 1.0, 2},
        {RC::W11, 3, 0.001, "fsr", 4.8e13, 21.0, 2},
        // continuous piecewise W21
        {RC::W21, 1, 0.01, "rsr", 1e6, 1.0, 2},
        {RC::W21, 1, 0.01, "arsr", 1e5, 10.0, 2},
        {RC::W21, 1, 0.01, "fsr", 2.2e5, 5.0, 1},
        {RC::W21, 1, 0.001, "rsr", 1e9, 1.0, 2},
        {RC::W21, 1, 0.001, "arsr", 3.2e7, 31.0, 2},
        {RC::W21, 1, 0.001, "fsr", 1e8, 10.0, 2},
        {RC::W21, 2, 0.01, "rsr", 1e8, 1.0, 2},
        {RC::W21, 2, 0.01, "arsr", 1e6, 100.0, 2},
        {RC::W21, 2, 0.01, "fsr", 4.6e5, 2.2e2, 2},
        {RC::W21, 2, 0.001, "rsr", 1e12, 1.0, 2},
        {RC::W21, 2, 0.001, "arsr", 1e9, 1000.0, 2},
        {RC::W21, 2, 0.001, "fsr", 2.6e8, 3.8e3, 2},
        {RC::W21, 3, 0.01, "rsr", 1e10, 1.0, 2},
        {RC::W21, 3, 0.01, "arsr", 1e7, 1000.0, 2},
        {RC::W21, 3, 0.01, "fsr", 9.9e5, 1.0e4, 2},
        {RC::W21, 3, 0.001, "rsr", 1e15, 1.0, 2},
        {RC::W21, 3, 0.001, "arsr", 3.2e10, 3.1e4, 2},
        {RC::W21, 3, 0.001, "fsr", 6.9e8, 1.4e6, 2},
    };
}

// ratio of the rounded RSR cell to the rounded method cell, then rounded to
// the printed precision; this is how the acceleration columns are built
inline double table_acceleration(const ShotTableRow& row) {
    const double rsr = round_sig(estimate_required_shots("rsr", row.d, row.eps, row.cls), 2);
    const double own = round_sig(estimate_required_shots(row.method, row.d, row.eps, row.cls), 2);
    return round_sig(rsr / own, row.accel_sigfigs);
}

}  // namespace qread::fixtures
