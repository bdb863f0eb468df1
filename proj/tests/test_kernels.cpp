#include <doctest.h>

#include "properties.hpp"

#include "circumfeas/kernels.hpp"

using namespace circumfeas;

namespace {

bool same(const Point &a, const Point &b) { return a.size() == b.size() && (a.array() == b.array()).all(); }

} // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
    props::Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = props::dim_for(trial);
        const int m = rng.integer(1, 64);
        std::vector<SetPtr> sets;
        for (int i = 0; i < m; ++i)
            sets.push_back(props::random_set(rng, d));
        const Point p = 0.3 * rng.gauss(d * m);
        Point a, b;
        kernels::project_blocks(sets, p, a, kernels::Exec::serial);
        kernels::project_blocks(sets, p, b, kernels::Exec::parallel);
        CHECK(same(a, b));
        kernels::displace_blocks(sets, p, a, kernels::Exec::serial);
        kernels::displace_blocks(sets, p, b, kernels::Exec::parallel);
        CHECK(same(a, b));

        const Point q = 0.3 * rng.gauss(d);
        CHECK(same(kernels::average_projections(sets, q, kernels::Exec::serial),
                   kernels::average_projections(sets, q, kernels::Exec::parallel)));
        CHECK(same(kernels::block_mean(p, d, m, kernels::Exec::serial),
                   kernels::block_mean(p, d, m, kernels::Exec::parallel)));

        const auto f = [&](int i) { return std::sin(0.1 * i) * p[i % p.size()]; };
        CHECK(kernels::evaluate(500, f, kernels::Exec::serial) == kernels::evaluate(500, f, kernels::Exec::parallel));
    }
}

TEST_CASE("kernel results match direct formulas") {
    std::vector<SetPtr> sets{std::make_shared<Ball>(Point::Zero(2), 1.0),
                             std::make_shared<Halfspace>(Point{{0.0, 1.0}}, 0.0)};
    const Point p{{3.0, 4.0}};
    const Point avg = kernels::average_projections(sets, p);
    CHECK((avg - 0.5 * (Point{{0.6, 0.8}} + Point{{3.0, 0.0}})).norm() <= 1e-15);
    const Point blocks{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}};
    CHECK((kernels::block_mean(blocks, 2, 3) - Point{{3.0, 4.0}}).norm() == 0.0);
    CHECK(kernels::thread_count() >= 1);
}

TEST_CASE("kernels reject mismatched sizes") {
    std::vector<SetPtr> sets{std::make_shared<Ball>(Point::Zero(2), 1.0)};
    Point out;
    CHECK_THROWS_AS(kernels::project_blocks(sets, Point::Zero(3), out), InvalidArgument);
    CHECK_THROWS_AS(kernels::block_mean(Point::Zero(5), 2, 3), InvalidArgument);
}
