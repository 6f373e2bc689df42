import math

import pytest

from promo_gym.envcore import RngStream
from promo_gym.errors import (
    InvalidAction,
    InvalidState,
    NoLayout,
    ParseError,
    SchemaError,
    SteppedAfterDone,
)
from promo_gym.tables import (
    TabularEnv,
    TransitionEntry,
    TransitionTable,
    deserialize,
    serialize,
    step_sample,
    validate,
)


def identity_table() -> TransitionTable:
    return TransitionTable(
        n_states=1,
        n_actions=1,
        entries={0: {0: [TransitionEntry(1.0, 0, 0.0, True)]}},
        initial_distribution={0: 1.0},
    )


class TestValidate:
    def test_identity_table_clean(self):
        assert validate(identity_table()) == []

    def test_reference_promo_table_clean(self, reference_table):
        assert validate(reference_table) == []

    def test_bad_probability_mass_reported(self):
        table = identity_table()
        table.entries[0][0] = [
            TransitionEntry(0.5, 0, 0.0, False),
            TransitionEntry(0.4, 0, 0.0, False),
        ]
        report = validate(table)
        assert len(report) == 1
        assert "probability mass 0.9" in report[0]
        assert "state 0, action 0" in report[0]

    def test_missing_action_reported(self):
        table = TransitionTable(
            n_states=1,
            n_actions=2,
            entries={0: {0: [TransitionEntry(1.0, 0, 0.0, True)]}},
            initial_distribution={0: 1.0},
        )
        assert any("action 1: missing" in v for v in validate(table))

    def test_next_state_out_of_range(self):
        table = identity_table()
        table.entries[0][0] = [TransitionEntry(1.0, 5, 0.0, True)]
        assert any("next state 5 out of range" in v for v in validate(table))

    def test_zero_probability_forbidden(self):
        table = identity_table()
        table.entries[0][0] = [
            TransitionEntry(0.0, 0, 0.0, True),
            TransitionEntry(1.0, 0, 0.0, True),
        ]
        assert any("not in (0, 1]" in v for v in validate(table))

    def test_bad_initial_distribution(self):
        table = identity_table()
        table.initial_distribution = {0: 0.5}
        assert any("initial distribution" in v for v in validate(table))

    def test_layout_must_cover_states(self):
        table = identity_table()
        table.layout = (2, 3)
        assert any("layout" in v for v in validate(table))


class TestStepSample:
    def test_deterministic_entry_ignores_rng(self, reference_table):
        # state 35, action 2 always lands on 45 with reward -1
        for seed in (0, 1, 99):
            out = step_sample(reference_table, 35, 2, RngStream(seed))
            assert (out.next_state, out.reward, out.done) == (45, -1.0, False)

    def test_single_entry_consumes_no_randomness(self, reference_table):
        rng = RngStream(5)
        before = RngStream(5).random()
        step_sample(reference_table, 35, 1, rng)
        assert rng.random() == before

    def test_realign_frequency_state_36(self, reference_table):
        # 70k draws from (36, realign): state 38 frequency 1/7 +/- 0.01
        rng = RngStream(2024)
        n = 70_000
        hits = sum(
            step_sample(reference_table, 36, 0, rng).next_state == 38
            for _ in range(n)
        )
        assert abs(hits / n - 1 / 7) <= 0.01

    def test_empirical_matches_listed_within_3_sigma(
        self, reference_table, lake_table_slippery
    ):
        # binomial 3-sigma band per listed entry, N = 1e5 draws per pair
        cases = [
            (reference_table, 35, 0),
            (reference_table, 36, 0),
            (lake_table_slippery, 0, 1),
            (lake_table_slippery, 6, 2),
        ]
        n = 100_000
        rng = RngStream(31337)
        for table, s, a in cases:
            counts: dict[int, int] = {}
            for _ in range(n):
                out = step_sample(table, s, a, rng)
                counts[out.next_state] = counts.get(out.next_state, 0) + 1
            expected: dict[int, float] = {}
            for e in table.entries[s][a]:
                expected[e.next_state] = expected.get(e.next_state, 0.0) + e.probability
            for nxt, p in expected.items():
                band = 3 * math.sqrt(p * (1 - p) / n)
                assert abs(counts.get(nxt, 0) / n - p) <= band, (s, a, nxt)

    def test_index_errors(self, reference_table):
        with pytest.raises(InvalidState):
            step_sample(reference_table, 50, 0, RngStream(0))
        with pytest.raises(InvalidAction):
            step_sample(reference_table, 0, 4, RngStream(0))


class TestTabularEnv:
    def test_step_after_done_raises(self):
        env = TabularEnv(identity_table())
        rng = RngStream(0)
        env.reset(rng)
        out = env.step(0, rng)
        assert out.done
        with pytest.raises(SteppedAfterDone):
            env.step(0, rng)

    def test_step_before_reset_raises(self):
        env = TabularEnv(identity_table())
        with pytest.raises(SteppedAfterDone):
            env.step(0, RngStream(0))

    def test_invalid_action(self, lake_table):
        env = TabularEnv(lake_table)
        env.reset(RngStream(0))
        with pytest.raises(InvalidAction):
            env.step(7, RngStream(0))

    def test_render_without_layout(self):
        env = TabularEnv(identity_table())
        env.reset(RngStream(0))
        with pytest.raises(NoLayout):
            env.render()

    def test_terminal_states(self, lake_table, reference_table):
        assert lake_table.terminal_states() == {5, 7, 11, 12, 15}
        # promo goal cells keep live actions, so nothing is fully terminal
        assert reference_table.terminal_states() == set()
        assert reference_table.goal_states() == {24}


class TestSerialization:
    def test_identity_round_trip(self):
        table = identity_table()
        assert deserialize(serialize(table)) == table

    def test_reference_table_round_trip_exact(self, reference_table):
        import json

        text = serialize(reference_table)
        again = deserialize(text)
        assert again == reference_table
        # all 20 entries of the two demo states survive, with exact text
        doc = json.loads(text)
        for s in ("35", "36"):
            assert json.dumps(doc["P"][s]).count("0.14285714285714285") == 7
        total_entries = sum(
            len(again.entries[s][a]) for s in (35, 36) for a in range(4)
        )
        assert total_entries == 20

    def test_frozen_lake_round_trips_both_modes(self, lake_table, lake_table_slippery):
        for table in (lake_table, lake_table_slippery):
            assert deserialize(serialize(table)) == table

    def test_key_order_ascending(self, reference_table):
        import json

        doc = json.loads(serialize(reference_table))
        states = [int(k) for k in doc["P"]]
        assert states == sorted(states)
        for actions in doc["P"].values():
            acts = [int(k) for k in actions]
            assert acts == sorted(acts)

    def test_missing_action_schema_error(self):
        text = serialize(identity_table()).replace('"n_actions": 1', '"n_actions": 2')
        with pytest.raises(SchemaError) as err:
            deserialize(text)
        assert "state 0" in str(err.value)

    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            deserialize("{not json")
        assert err.value.line == 1
        assert "line 1" in str(err.value)

    def test_bad_done_type(self):
        text = serialize(identity_table()).replace("true", "1")
        with pytest.raises(SchemaError):
            deserialize(text)
