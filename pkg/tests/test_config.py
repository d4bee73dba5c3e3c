import json

import pytest

from mirrorpo.config import ConfigError, load, loads, parse_config

BASE = {
    "env": {"name": "short_corridor"},
    "algo": {"algorithm": "mpo", "step_size": 0.01, "episodes": 10},
    "seeds": [0, 1],
    "output": {"dir": "out", "log_every": 2},
    "oracle_logging": True,
}


def with_(**changes):
    raw = json.loads(json.dumps(BASE))
    raw.update(changes)
    return raw


class TestParse:
    def test_minimal(self):
        cfg = parse_config({"env": {}, "algo": {}, "seeds": [4]})
        assert cfg.env.name == "short_corridor"
        assert cfg.algo.algorithm == "mpo"
        assert cfg.log_every == 1 and cfg.oracle_logging

    def test_round_trip(self):
        raw = with_(algo=[{"name": "a", "algorithm": "vrmpo", "mirror": {"kind": "pnorm",
                                                                           "p": 1.5},
                           "vrmpo": {"N1": 4, "N2": 2, "m": 3, "K": 2}},
                          {"name": "b", "algorithm": "vpg"}],
                    env={"name": "random_mdp", "num_states": 2, "num_actions": 2, "seed": 1,
                         "gamma": 0.9, "successors": 1, "terminal_prob": [0.5, 0.8]})
        first = parse_config(raw)
        second = loads(first.dumps())
        assert first == second
        assert first.dumps() == second.dumps()

    def test_builds_env(self):
        cfg = parse_config(with_(env={"name": "random_mdp", "num_states": 3, "num_actions": 2,
                                      "seed": 5}))
        mdp = cfg.env.build()
        assert mdp.num_states == 3 and mdp.num_actions == 2

    def test_load_file(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(BASE))
        assert load(p).seeds == (0, 1)


class TestErrors:
    def test_every_violation_listed(self):
        raw = with_(extra=1, seeds=[1, 1], output={"dir": "", "log_every": 0, "color": 1})
        raw["algo"]["bogus"] = 2
        with pytest.raises(ConfigError) as info:
            parse_config(raw)
        text = "\n".join(info.value.errors)
        for needle in ("'extra'", "distinct", "output.dir", "log_every", "'color'", "'bogus'"):
            assert needle in text
        assert len(info.value.errors) == 6

    @pytest.mark.parametrize("algo, needle", [
        ({"algorithm": "ppo"}, "algorithm"),
        ({"step_size": "big"}, "step_size"),
        ({"episodes": 2.5}, "episodes"),
        ({"mirror": {"kind": "pnorm", "p": 0.5}}, "mirror"),
        ({"mirror": {"kind": "entropy"}}, "kind"),
        ({"vrmpo": {"N1": 3, "m": 1}}, "vrmpo"),
        ({"theta0_range": [1]}, "theta0_range"),
        ({"step_size": -1.0}, "positive"),
    ])
    def test_algo_errors(self, algo, needle):
        with pytest.raises(ConfigError, match=needle):
            parse_config(with_(algo=algo))

    def test_missing_keys(self):
        with pytest.raises(ConfigError) as info:
            parse_config({})
        assert len(info.value.errors) >= 3

    def test_seeds(self):
        for bad in ([], [1.5], "1"):
            with pytest.raises(ConfigError, match="seeds"):
                parse_config(with_(seeds=bad))

    def test_env_errors(self):
        with pytest.raises(ConfigError, match="num_states"):
            parse_config(with_(env={"name": "random_mdp", "num_actions": 2, "seed": 0}))
        with pytest.raises(ConfigError, match="gamma"):
            parse_config(with_(env={"gamma": 1.5}))

    def test_duplicate_names(self):
        with pytest.raises(ConfigError, match="distinct"):
            parse_config(with_(algo=[{"algorithm": "mpo"}, {"algorithm": "mpo"}]))

    def test_bad_json(self):
        with pytest.raises(ConfigError, match="JSON"):
            loads("{not json")
