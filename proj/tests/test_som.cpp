#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/som.hpp"

using namespace ncd;

namespace {

NeighborhoodSchedule window_schedule(double radius, std::size_t sweeps) {
    NeighborhoodSchedule s;
    s.kind = NeighborhoodKind::Window;
    s.initial_radius = radius;
    s.final_radius = radius;
    s.sweep_count = sweeps;
    return s;
}

// Exhaustive optimum for the piecewise-constant projection. Enumerates all
// breakpoint placements and computes each segment's error by direct loops, so
// it shares no arithmetic shortcuts with the dynamic program.
double exhaustive_segment_error(std::span<const double> samples, std::size_t segments,
                                std::size_t first, std::vector<std::size_t>& starts);

double segments_error(std::span<const double> samples, const std::vector<std::size_t>& starts) {
    double total = 0.0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const std::size_t begin = starts[s];
        const std::size_t end = (s + 1 < starts.size()) ? starts[s + 1] : samples.size();
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += samples[i];
        mean /= static_cast<double>(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            total += (samples[i] - mean) * (samples[i] - mean);
    }
    return total;
}

double exhaustive_segment_error(std::span<const double> samples, std::size_t segments,
                                std::size_t first, std::vector<std::size_t>& starts) {
    if (starts.size() == segments) {
        // Remaining samples form the last segment; require it nonempty.
        return segments_error(samples, starts);
    }
    double best = std::numeric_limits<double>::infinity();
    const std::size_t remaining = segments - starts.size();
    for (std::size_t s = first; s + remaining <= samples.size(); ++s) {
        starts.push_back(s);
        best = std::min(best, exhaustive_segment_error(samples, segments, s + 1, starts));
        starts.pop_back();
    }
    return best;
}

} // namespace

TEST_CASE("grid lattice indexing is row-major") {
    const MapLattice g = MapLattice::grid(2, 3);
    CHECK(g.neuron_count() == 6);
    CHECK(g.rows() == 2);
    CHECK(g.cols() == 3);
    CHECK(g.coordinates(0) == std::pair<int, int>{0, 0});
    CHECK(g.coordinates(2) == std::pair<int, int>{0, 2});
    CHECK(g.coordinates(3) == std::pair<int, int>{1, 0});
    CHECK_THROWS_AS((void)g.coordinates(6), InvalidInput);
    CHECK_THROWS_AS((void)MapLattice::grid(0, 3), InvalidInput);
}

TEST_CASE("lattice distances under both metrics") {
    const MapLattice g = MapLattice::grid(3, 3);
    // Neurons 0 = (0,0) and 4 = (1,1).
    CHECK(g.distance(0, 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(g.distance(0, 0) == 0.0);
    const MapLattice m = MapLattice::grid(3, 3, LatticeMetric::Manhattan);
    CHECK(m.distance(0, 4) == 2.0);
    CHECK(m.distance(0, 2) == 2.0);
}

TEST_CASE("lattice neighbors sit at distance exactly one") {
    const MapLattice g = MapLattice::grid(2, 2);
    CHECK(g.are_neighbors(0, 1));
    CHECK(g.are_neighbors(0, 2));
    CHECK_FALSE(g.are_neighbors(0, 3)); // diagonal, distance sqrt(2)
    CHECK_FALSE(g.are_neighbors(1, 1));

    const MapLattice s = MapLattice::string(4);
    CHECK(s.are_neighbors(1, 2));
    CHECK_FALSE(s.are_neighbors(0, 2));
}

TEST_CASE("schedule validation and radius interpolation") {
    NeighborhoodSchedule s;
    s.initial_radius = 3.0;
    s.final_radius = 1.0;
    s.sweep_count = 5;
    s.validate();
    CHECK(s.radius_at(0) == 3.0);
    CHECK(s.radius_at(4) == 1.0);
    CHECK(s.radius_at(2) == doctest::Approx(2.0).epsilon(1e-15));

    NeighborhoodSchedule single;
    single.sweep_count = 1;
    single.initial_radius = 3.0;
    single.final_radius = 0.5;
    CHECK(single.radius_at(0) == 0.5); // one sweep runs at the final radius

    NeighborhoodSchedule bad;
    bad.initial_radius = 0.5;
    bad.final_radius = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = {};
    bad.sweep_count = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = {};
    bad.final_radius = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    CHECK_THROWS_AS((void)s.radius_at(5), InvalidInput);
}

TEST_CASE("neighborhood weights") {
    const MapLattice s = MapLattice::string(5);
    NeighborhoodSchedule gaussian;
    gaussian.kind = NeighborhoodKind::Gaussian;
    gaussian.initial_radius = 2.0;
    gaussian.final_radius = 2.0;
    gaussian.sweep_count = 3;

    // Own neuron always gets weight one.
    CHECK(neighborhood_weight(gaussian, s, 2, 2, 0) == 1.0);
    // Distance 2 at radius 2: exp(-4 / 8) = exp(-1/2).
    CHECK(neighborhood_weight(gaussian, s, 0, 2, 0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

    NeighborhoodSchedule window = window_schedule(1.5, 2);
    CHECK(neighborhood_weight(window, s, 0, 1, 0) == 1.0);
    CHECK(neighborhood_weight(window, s, 0, 2, 0) == 0.0);

    // All weights stay inside [0, 1].
    for (std::size_t c = 0; c < 5; ++c)
        for (std::size_t d = 0; d < 5; ++d) {
            const double w = neighborhood_weight(gaussian, s, c, d, 1);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0);
        }

    CHECK_THROWS_AS((void)neighborhood_weight(gaussian, s, 0, 9, 0), InvalidInput);
    CHECK_THROWS_AS((void)neighborhood_weight(gaussian, s, 0, 1, 7), InvalidInput);
}

TEST_CASE("weight table matches the pointwise function and is symmetric") {
    const MapLattice g = MapLattice::grid(2, 3);
    NeighborhoodSchedule s;
    s.initial_radius = 2.0;
    s.final_radius = 1.0;
    s.sweep_count = 4;
    const Matrix table = neighbor_weight_table(s, g, 1);
    REQUIRE(table.rows() == 6);
    REQUIRE(table.cols() == 6);
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t d = 0; d < 6; ++d) {
            CHECK(table(c, d) == neighborhood_weight(s, g, c, d, 1));
            CHECK(table(c, d) == table(d, c));
        }
    for (std::size_t c = 0; c < 6; ++c) CHECK(table(c, c) == 1.0);
}

TEST_CASE("assignment picks the closest prototype, ties to the lowest index") {
    const Matrix prototypes = Matrix::from_rows({{0.0, 0.0}, {1.0, 1.0}});
    const std::vector<double> near_one{0.9, 0.9};
    CHECK(assign(near_one, prototypes) == 1);
    const std::vector<double> tie{0.5, 0.5};
    CHECK(assign(tie, prototypes) == 0);
    const std::vector<double> origin{0.0, 0.0};
    CHECK(assign(origin, prototypes) == 0);
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS((void)assign(wrong, prototypes), InvalidInput);
}

TEST_CASE("initial prototype rows are seeded, distinct, and shared") {
    const auto rows = initial_prototype_rows(10, 4, 99);
    REQUIRE(rows.size() == 4);
    std::vector<std::size_t> sorted = rows;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (std::size_t r : rows) CHECK(r < 10);
    CHECK(rows == initial_prototype_rows(10, 4, 99));
    CHECK(rows != initial_prototype_rows(10, 4, 100));

    // Fewer observations than neurons: indices wrap but stay in range.
    const auto wrapped = initial_prototype_rows(3, 5, 7);
    REQUIRE(wrapped.size() == 5);
    for (std::size_t r : wrapped) CHECK(r < 3);

    CHECK_THROWS_AS((void)initial_prototype_rows(0, 2, 1), InvalidInput);
}

TEST_CASE("single-neuron map converges to the data mean") {
    Rng rng(512);
    Matrix data(40, 3);
    for (double& v : data.data()) v = rng.uniform(-5.0, 5.0);
    const auto result = batch_som_train(data, MapLattice::string(1), window_schedule(0.5, 3), 1);
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 40; ++i) mean += data(i, j);
        mean /= 40.0;
        CHECK(result.prototypes(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }
    CHECK(result.assignments == std::vector<std::size_t>(40, 0));
    CHECK(result.energy_trace.size() == 3);
    CHECK(result.assignment_history.size() == 3);
}

TEST_CASE("two separated clusters end on their means") {
    // Window radius below 1 makes the neighborhood the identity, so the run
    // is plain alternating assignment/mean updates from the given start.
    Matrix data = Matrix::from_rows({{0.0, 0.0},
                                     {0.2, 0.0},
                                     {0.0, 0.2},
                                     {0.2, 0.2},
                                     {10.0, 10.0},
                                     {10.2, 10.0},
                                     {10.0, 10.2},
                                     {10.2, 10.2}});
    const Matrix init = Matrix::from_rows({{0.1, 0.1}, {10.1, 10.1}});
    const auto result =
        batch_som_train(data, MapLattice::string(2), window_schedule(0.5, 6), 1, &init);
    CHECK(result.prototypes(0, 0) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(result.prototypes(0, 1) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(result.prototypes(1, 0) == doctest::Approx(10.1).epsilon(1e-6));
    CHECK(result.prototypes(1, 1) == doctest::Approx(10.1).epsilon(1e-6));
    CHECK(result.assignments == std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1});
}

TEST_CASE("duplicating the dataset leaves prototypes unchanged") {
    // Dyadic values keep every accumulated sum exact, so the ratio invariance
    // of the update holds bitwise.
    Matrix data = Matrix::from_rows(
        {{0.0}, {1.0}, {1.5}, {7.0}, {8.0}, {8.25}});
    Matrix doubled(12, 1);
    for (std::size_t i = 0; i < 6; ++i) {
        doubled(i, 0) = data(i, 0);
        doubled(i + 6, 0) = data(i, 0);
    }
    const Matrix init = Matrix::from_rows({{1.0}, {8.0}});
    const NeighborhoodSchedule schedule = window_schedule(0.5, 4);
    const auto a = batch_som_train(data, MapLattice::string(2), schedule, 3, &init);
    const auto b = batch_som_train(doubled, MapLattice::string(2), schedule, 3, &init);
    CHECK(a.prototypes == b.prototypes);
}

TEST_CASE("translating the data translates the prototypes") {
    SUBCASE("exact on dyadic data with power-of-two cluster sizes") {
        Matrix data = Matrix::from_rows({{0.0}, {1.0}, {7.0}, {8.0}});
        const Matrix init = Matrix::from_rows({{0.0}, {8.0}});
        const double v = 0.375;
        Matrix shifted = data;
        for (double& x : shifted.data()) x += v;
        Matrix shifted_init = init;
        for (double& x : shifted_init.data()) x += v;
        const NeighborhoodSchedule schedule = window_schedule(0.5, 5);
        const auto base = batch_som_train(data, MapLattice::string(2), schedule, 1, &init);
        const auto moved =
            batch_som_train(shifted, MapLattice::string(2), schedule, 1, &shifted_init);
        for (std::size_t c = 0; c < 2; ++c)
            CHECK(moved.prototypes(c, 0) == base.prototypes(c, 0) + v);
        CHECK(base.assignments == moved.assignments);
    }
    SUBCASE("within 1e-12 on generic data") {
        Rng rng(2718);
        Matrix data(60, 2);
        for (double& x : data.data()) x = rng.uniform(-1.0, 1.0);
        const std::vector<double> v{3.25, -2.5};
        Matrix shifted = data;
        for (std::size_t i = 0; i < 60; ++i)
            for (std::size_t j = 0; j < 2; ++j) shifted(i, j) += v[j];
        NeighborhoodSchedule schedule; // default gaussian, decaying radius
        schedule.sweep_count = 15;
        const auto base = batch_som_train(data, MapLattice::grid(2, 2), schedule, 5);
        const auto moved = batch_som_train(shifted, MapLattice::grid(2, 2), schedule, 5);
        CHECK(base.assignments == moved.assignments);
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(moved.prototypes(c, j) ==
                      doctest::Approx(base.prototypes(c, j) + v[j]).epsilon(1e-12));
    }
}

TEST_CASE("training is deterministic per seed and records traces") {
    Rng rng(31);
    Matrix data(50, 2);
    for (double& x : data.data()) x = rng.uniform01();
    NeighborhoodSchedule schedule;
    schedule.sweep_count = 10;
    const auto a = batch_som_train(data, MapLattice::grid(2, 3), schedule, 8);
    const auto b = batch_som_train(data, MapLattice::grid(2, 3), schedule, 8);
    CHECK(a.prototypes == b.prototypes);
    CHECK(a.assignments == b.assignments);
    CHECK(a.energy_trace == b.energy_trace);
    REQUIRE(a.energy_trace.size() == 10);
    REQUIRE(a.assignment_history.size() == 10);
    for (double e : a.energy_trace) CHECK(e >= 0.0);
    // Final assignments are the nearest prototypes of the final state.
    for (std::size_t i = 0; i < data.rows(); ++i)
        CHECK(a.assignments[i] == assign(data.row(i), a.prototypes));
}

TEST_CASE("an empty neuron keeps its prototype") {
    // Outlier prototype far from all data never attracts anything under an
    // identity neighborhood, so it must remain exactly where it started.
    Matrix data = Matrix::from_rows({{0.0}, {0.5}, {1.0}});
    const Matrix init = Matrix::from_rows({{0.5}, {1000.0}});
    const auto result =
        batch_som_train(data, MapLattice::string(2), window_schedule(0.5, 3), 1, &init);
    CHECK(result.prototypes(1, 0) == 1000.0);
    CHECK(result.prototypes(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("map quality on exact prototypes") {
    const Matrix data = Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
    const MapLattice lattice = MapLattice::string(4);
    const MapQuality q = map_quality(data, data, lattice);
    CHECK(q.quantization_error == 0.0);
    // Ordered collinear prototypes: every second-best neuron is adjacent.
    CHECK(q.topographic_error == 0.0);
}

TEST_CASE("single-neuron maps have zero topographic error by convention") {
    const Matrix data = Matrix::from_rows({{0.0}, {5.0}});
    const Matrix prototype = Matrix::from_rows({{1.0}});
    const MapQuality q = map_quality(data, prototype, MapLattice::string(1));
    CHECK(q.topographic_error == 0.0);
    CHECK(q.quantization_error == doctest::Approx((1.0 + 4.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("scrambled prototypes break topology") {
    // Prototypes laid out out of order on the string: points between them
    // pick non-adjacent best pairs.
    const Matrix data = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
    const Matrix prototypes = Matrix::from_rows({{0.0}, {2.0}, {1.0}});
    const MapQuality q = map_quality(data, prototypes, MapLattice::string(3));
    // Point 0.0: best 0, second 2 (value 1.0) -> not neighbors? 0 and 2 are
    // two apart on the string, so that's a break.
    CHECK(q.topographic_error > 0.0);
    CHECK_THROWS_AS((void)map_quality(data, prototypes, MapLattice::string(2)), InvalidInput);
}

TEST_CASE("quality of a converged line map") {
    const Matrix data = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
    const Matrix init = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
    const auto result =
        batch_som_train(data, MapLattice::string(3), window_schedule(0.5, 2), 1, &init);
    const MapQuality q = map_quality(data, result.prototypes, MapLattice::string(3));
    CHECK(q.quantization_error == 0.0);
    CHECK(q.topographic_error == 0.0);
}

TEST_CASE("sampled derivative on simple functions") {
    const std::vector<double> grid{0.0, 1.0, 2.0};

    const std::vector<double> constant{4.0, 4.0, 4.0};
    CHECK(derivative_preprocess(constant, grid) == std::vector<double>{0.0, 0.0, 0.0});

    const std::vector<double> linear{0.0, 2.0, 4.0}; // 2x
    CHECK(derivative_preprocess(linear, grid) == std::vector<double>{2.0, 2.0, 2.0});

    // x^2 sampled at 0, 1, 2: one-sided ends give 1 and 3, central middle 2.
    const std::vector<double> square{0.0, 1.0, 4.0};
    CHECK(derivative_preprocess(square, grid) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("sampled derivative input validation") {
    const std::vector<double> grid{0.0, 0.5};
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS((void)derivative_preprocess(one, grid), InvalidInput);
    const std::vector<double> bad_grid{0.0, 0.0};
    CHECK_THROWS_AS((void)derivative_preprocess(two, bad_grid), InvalidInput);
    const std::vector<double> single_grid{0.0};
    const std::vector<double> single{1.0};
    CHECK_THROWS_AS((void)derivative_preprocess(single, single_grid), InvalidInput);
}

TEST_CASE("segment projection trivial cases") {
    const std::vector<double> constant{2.0, 2.0, 2.0, 2.0};
    for (std::size_t s : {1u, 2u, 3u}) {
        const auto proj = segment_project_prototype(constant, s);
        CHECK(proj.squared_error == 0.0);
        CHECK(proj.values == constant);
        CHECK(proj.breakpoints.size() == s);
        CHECK(proj.breakpoints[0] == 0);
    }

    // A clean two-level step is recovered exactly with two segments.
    const std::vector<double> step{1.0, 1.0, 1.0, 5.0, 5.0};
    const auto proj = segment_project_prototype(step, 2);
    CHECK(proj.squared_error == 0.0);
    CHECK(proj.values == step);
    CHECK(proj.breakpoints == std::vector<std::size_t>{0, 3});

    // One segment per sample reproduces the input.
    const std::vector<double> any{3.0, -1.0, 2.0};
    const auto full = segment_project_prototype(any, 3);
    CHECK(full.squared_error == 0.0);
    CHECK(full.values == any);

    CHECK_THROWS_AS((void)segment_project_prototype(any, 4), InvalidInput);
    CHECK_THROWS_AS((void)segment_project_prototype(any, 0), InvalidInput);
    CHECK_THROWS_AS((void)segment_project_prototype({}, 1), InvalidInput);
}

TEST_CASE("segment projection matches exhaustive search") {
    Rng rng(808);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> samples(8);
        for (double& v : samples) v = rng.uniform(-2.0, 2.0);
        const auto proj = segment_project_prototype(samples, 3);
        // Recompute the returned segmentation's error with the oracle's own
        // arithmetic, then compare against the enumerated optimum exactly.
        std::vector<std::size_t> scratch{0};
        const double best = exhaustive_segment_error(samples, 3, 1, scratch);
        CHECK(segments_error(samples, proj.breakpoints) == best);
    }
}

TEST_CASE("segment projection error is nonincreasing in the segment count") {
    Rng rng(909);
    std::vector<double> samples(10);
    for (double& v : samples) v = rng.uniform(0.0, 4.0);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s <= 10; ++s) {
        const double err = segment_project_prototype(samples, s).squared_error;
        CHECK(err <= previous + 1e-12);
        previous = err;
    }
    CHECK(segment_project_prototype(samples, 10).squared_error ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("segment values are the segment means") {
    const std::vector<double> samples{0.0, 2.0, 10.0, 14.0};
    const auto proj = segment_project_prototype(samples, 2);
    CHECK(proj.breakpoints == std::vector<std::size_t>{0, 2});
    CHECK(proj.values == std::vector<double>{1.0, 1.0, 12.0, 12.0});
    CHECK(proj.squared_error == doctest::Approx(2.0 + 8.0).epsilon(1e-12));
}
