import random

import pytest

from txsched import (
    ChannelConfig,
    ConnectionStats,
    Schedule,
    SimReport,
    TransmissionRequest,
    collision_summary,
    pdr,
    simulate,
)


def req(id=0, deadline=1_000_000, packets=1, airtime=23, overhead=58):
    return TransmissionRequest(
        id=id,
        deadline=deadline,
        packet_count=packets,
        packet_airtime=airtime,
        per_packet_overhead=overhead,
    )


def train(n, packets=50, **kw):
    return [req(id=i, packets=packets, **kw) for i in range(n)]


def stats(id, sent, received=0, collided=0, ambient=0):
    return ConnectionStats(
        connection_id=id,
        sent=sent,
        received=received,
        collided=collided,
        ambient_lost=ambient,
        delivered_late=0,
        delay_total_us=0,
        realized_duration_us=0,
    )


class TestUncontended:
    def test_closed_form_timeline(self):
        # each packet costs exactly aifs + airtime when nobody contends
        report = simulate(train(1), Schedule((0,)), ChannelConfig(), seed=1)
        c = report.per_connection[0]
        assert c.sent == c.received == 50
        assert c.realized_duration_us == 50 * (58 + 23)
        assert c.delay_total_us == 0
        assert report.backoff_activations == 0

    def test_nonzero_start_shifts_nothing_else(self):
        report = simulate(train(1), Schedule((977,)), ChannelConfig(), seed=1)
        c = report.per_connection[0]
        assert c.realized_duration_us == 50 * 81
        assert c.delay_total_us == 0


class TestForcedTies:
    def test_two_way_simultaneous_commit(self):
        reqs = train(2, packets=1)
        report = simulate(reqs, Schedule((0, 0)), ChannelConfig(cw=1), seed=5)
        assert collision_summary(report) == [1, 1]
        assert pdr(report) == 0.0
        assert report.backoff_activations == 0

    def test_three_way_simultaneous_commit(self):
        reqs = train(3, packets=1)
        report = simulate(reqs, Schedule((0, 0, 0)), ChannelConfig(), seed=5)
        assert collision_summary(report) == [1, 1, 1]
        assert pdr(report) == 0.0

    def test_aligned_full_trains_all_collide(self):
        report = simulate(train(2), Schedule((0, 0)), ChannelConfig(), seed=3)
        assert collision_summary(report) == [50, 50]
        assert pdr(report) == 0.0


class TestDisjointSchedules:
    def test_gap_after_full_train_is_clean(self):
        report = simulate(train(2), Schedule((0, 4131)), ChannelConfig(), seed=9)
        assert collision_summary(report) == [0, 0]
        assert pdr(report) == 1.0
        assert report.backoff_activations == 0

    def test_random_disjoint_with_aifs_gaps(self):
        # nominal durations use overhead = aifs, so back-to-back trains
        # with at least an aifs of slack never contend
        rng = random.Random(424242)
        for _ in range(60):
            n = rng.randint(1, 3)
            reqs = train(n, packets=rng.randint(1, 5))
            starts, t = [], 0
            for r in reqs:
                t += rng.randint(0, 300)
                starts.append(t)
                t += r.packet_count * (58 + 23) + 58
            report = simulate(reqs, Schedule(tuple(starts)), ChannelConfig(), seed=7)
            assert pdr(report) == 1.0
            assert report.total_collided == 0
            assert report.backoff_activations == 0


class TestHandTracedContention:
    def test_aifs_abort_then_lockstep_cascade(self):
        # Second sender arrives at 100, mid first sender's inter-packet
        # AIFS. Its own AIFS is cut short at 139 by the first sender's
        # transmission (one backoff activation; cw=1 draws 0). From the
        # next idle instant both AIFS expiries coincide at 220, so packets
        # collide in lockstep until the first train ends at 4050, leaving
        # the second sender's last two packets clean, each delayed 62us.
        reqs = train(2)
        config = ChannelConfig(cw=1)
        report = simulate(reqs, Schedule((0, 100)), config, seed=11)
        a, b = report.per_connection
        assert (a.received, a.collided) == (2, 48)
        assert (b.received, b.collided) == (2, 48)
        assert report.backoff_activations == 1
        assert a.delay_total_us == 0
        assert b.delay_total_us == 50 * 62
        assert a.realized_duration_us == 4050
        assert b.realized_duration_us == 4212 - 100
        # cw=1 leaves nothing to the RNG: any seed reproduces this
        assert report == simulate(reqs, Schedule((0, 100)), config, seed=999)

    def test_partial_overlap_collides_exactly_in_the_overlap(self):
        # 17-cycle offset: later arrival is aligned to the packet cycle,
        # so the 33 overlapped packet pairs collide and the rest deliver
        report = simulate(train(2), Schedule((0, 17 * 81)), ChannelConfig(), seed=2)
        a, b = report.per_connection
        assert (a.received, a.collided) == (17, 33)
        assert (b.received, b.collided) == (17, 33)
        assert pdr(report) == 0.34


class TestConservationAndDeterminism:
    def _random_run(self, rng):
        n = rng.randint(1, 3)
        reqs = [
            req(
                id=i,
                packets=rng.randint(1, 6),
                airtime=rng.randint(5, 40),
            )
            for i in range(n)
        ]
        schedule = Schedule(tuple(rng.randint(0, 2000) for _ in range(n)))
        channel = ChannelConfig(
            slot_time=rng.choice((9, 13)),
            aifs=rng.choice((34, 58)),
            cw=rng.choice((1, 2, 8, 15)),
            ambient_loss_rate=rng.choice((0.0, 0.1, 0.5)),
        )
        seed = rng.randint(0, 10**9)
        return reqs, schedule, channel, seed

    def test_conservation_every_run(self):
        rng = random.Random(515151)
        for _ in range(250):
            reqs, schedule, channel, seed = self._random_run(rng)
            report = simulate(reqs, schedule, channel, seed)
            for r, c in zip(reqs, report.per_connection):
                assert c.sent == r.packet_count
                assert c.sent == c.received + c.collided + c.ambient_lost
                assert c.delay_total_us >= 0
                # pacing can only lose to the uncontended closed form
                assert c.realized_duration_us >= r.packet_count * (
                    channel.aifs + r.packet_airtime
                )
            assert 0.0 <= pdr(report) <= 1.0

    def test_collisions_always_mutual(self):
        rng = random.Random(626262)
        seen_collision = False
        for _ in range(200):
            reqs, schedule, channel, seed = self._random_run(rng)
            report = simulate(reqs, schedule, channel, seed)
            colliding = [c for c in report.per_connection if c.collided > 0]
            if colliding:
                seen_collision = True
                assert len(colliding) >= 2
        assert seen_collision

    def test_two_connection_collision_counts_match(self):
        rng = random.Random(737373)
        for _ in range(150):
            reqs, schedule, channel, seed = self._random_run(rng)
            reqs, schedule = reqs[:2], Schedule(schedule.starts[:2])
            if len(reqs) < 2:
                continue
            report = simulate(reqs, schedule, channel, seed)
            a, b = report.per_connection
            assert a.collided == b.collided

    def test_identical_seeds_identical_reports(self):
        rng = random.Random(848484)
        for _ in range(60):
            reqs, schedule, channel, seed = self._random_run(rng)
            first = simulate(reqs, schedule, channel, seed)
            second = simulate(reqs, schedule, channel, seed)
            assert first == second
            assert repr(first) == repr(second)

    def test_no_backoff_without_simultaneous_contention(self):
        rng = random.Random(959595)
        for _ in range(100):
            reqs, schedule, channel, seed = self._random_run(rng)
            report = simulate(reqs, schedule, channel, seed)
            if len(reqs) == 1:
                assert report.backoff_activations == 0


class TestAmbientLoss:
    def test_rate_one_loses_every_clean_packet(self):
        channel = ChannelConfig(ambient_loss_rate=1.0)
        report = simulate(train(1), Schedule((0,)), channel, seed=4)
        c = report.per_connection[0]
        assert (c.received, c.ambient_lost, c.collided) == (0, 50, 0)
        assert pdr(report) == 0.0

    def test_rate_frequency_on_long_train(self):
        channel = ChannelConfig(ambient_loss_rate=0.3)
        reqs = [req(packets=2000, deadline=10_000_000)]
        report = simulate(reqs, Schedule((0,)), channel, seed=17)
        lost = report.per_connection[0].ambient_lost
        assert abs(lost / 2000 - 0.3) <= 0.05

    def test_losses_do_not_break_conservation(self):
        channel = ChannelConfig(ambient_loss_rate=0.25)
        report = simulate(train(2), Schedule((0, 17 * 81)), channel, seed=6)
        for c in report.per_connection:
            assert c.sent == c.received + c.collided + c.ambient_lost
        # collided packets never roll an ambient loss: the 33-pair overlap
        # stays exact even with lossy air
        assert collision_summary(report) == [33, 33]


class TestDeadlineAccounting:
    def test_disabled_by_default(self):
        reqs = [req(deadline=100, packets=2)]
        report = simulate(reqs, Schedule((0,)), ChannelConfig(), seed=1)
        assert report.per_connection[0].delivered_late == 0

    def test_late_packets_counted_when_enabled(self):
        # packets end at 81 and 162; only the second misses deadline 100
        reqs = [req(deadline=100, packets=2)]
        report = simulate(
            reqs, Schedule((0,)), ChannelConfig(), seed=1, deadline_accounting=True
        )
        c = report.per_connection[0]
        assert c.received == 2
        assert c.delivered_late == 1


class TestReportOps:
    def test_pdr_arithmetic(self):
        report = SimReport(
            per_connection=(
                stats(0, 50, received=43, collided=7),
                stats(1, 50, received=43, collided=7),
            ),
            backoff_activations=0,
        )
        assert pdr(report) == 0.86

    def test_pdr_without_sent_packets(self):
        report = SimReport(per_connection=(stats(0, 0),), backoff_activations=0)
        with pytest.raises(ValueError):
            pdr(report)

    def test_collision_summary_order(self):
        report = SimReport(
            per_connection=(
                stats(0, 5, received=4, collided=1),
                stats(1, 5, received=2, collided=3),
            ),
            backoff_activations=0,
        )
        assert collision_summary(report) == [1, 3]

    def test_mean_delay_aggregate(self):
        report = simulate(train(2), Schedule((0, 100)), ChannelConfig(cw=1), seed=1)
        total = sum(c.delay_total_us for c in report.per_connection)
        assert report.mean_delay_us == total / 100


class TestTrace:
    def test_uncontended_trace_shape(self):
        trace = []
        simulate(
            [req(packets=2)], Schedule((0,)), ChannelConfig(), seed=1, trace=trace
        )
        assert trace[0] == "0 c0 idle-until-start->sensing"
        assert trace[1] == "0 c0 sensing->aifs-wait"
        assert "58 c0 aifs-wait->tx-pending" in trace
        assert "81 c0 packet 0 received" in trace
        assert trace[-1].endswith("transmitting->done")
        assert sum("received" in line for line in trace) == 2

    def test_defer_shows_in_trace(self):
        trace = []
        simulate(
            train(2), Schedule((0, 100)), ChannelConfig(cw=1), seed=1, trace=trace
        )
        assert any("aifs-wait->backoff-wait-idle" in line for line in trace)
        assert any("backoff-aifs" in line for line in trace)


class TestValidation:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            simulate(train(2), Schedule((0,)), ChannelConfig(), seed=1)

    def test_negative_start(self):
        with pytest.raises(ValueError):
            simulate(train(1), Schedule((-5,)), ChannelConfig(), seed=1)

    def test_channel_validation(self):
        with pytest.raises(ValueError):
            ChannelConfig(slot_time=0)
        with pytest.raises(ValueError):
            ChannelConfig(cw=0)
        with pytest.raises(ValueError):
            ChannelConfig(ambient_loss_rate=1.5)
        with pytest.raises(ValueError):
            ChannelConfig(packet_airtime=0)
