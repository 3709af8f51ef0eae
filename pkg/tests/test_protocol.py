"""Wire grammar: move parsing, echo formatting, telemetry round trips."""

import random

import pytest

from balancebot.protocol import (
    MAX_STEERING,
    MAX_VELOCITY,
    CommandError,
    MoveCommand,
    TelemetryFrame,
    decode_telemetry,
    encode_telemetry,
    format_echo,
    format_move,
    parse_move,
)


class TestParseMove:
    @pytest.mark.parametrize("line,velocity,steering", [
        ("mov1.50,-0.50", 1.5, -0.5),
        ("mov0,0", 0.0, 0.0),
        ("mov-10,5", -10.0, 5.0),
        ("mov2.25,1.75", 2.25, 1.75),
        ("mov1,2,3", 1.0, 2.0),        # trailing junk after field two tolerated
        ("mov  1.0 , 2.0", 1.0, 2.0),  # float() eats surrounding spaces
        ("mov1e1,0", 10.0, 0.0),
    ])
    def test_accepted(self, line, velocity, steering):
        cmd = parse_move(line)
        assert cmd == MoveCommand(velocity, steering)

    @pytest.mark.parametrize("line", [
        "xxxxx",
        "",
        "settings1,2,3",
        "MOV1,2",        # prefix is case sensitive
        "x1.00,2.00",    # echo lines are not commands
        "reset",
    ])
    def test_ignored(self, line):
        assert parse_move(line) is None

    @pytest.mark.parametrize("line", [
        "mov1.5",        # no comma
        "mov",
        "mov,",
        "movx,y",
        "mov1.0,",
        "mov,2.0",
        "movnan,0",
        "movinf,0",
        "mov0,-inf",
        "mov1.0.0,2",
    ])
    def test_malformed_raises(self, line):
        with pytest.raises(CommandError):
            parse_move(line)

    @pytest.mark.parametrize("line,velocity,steering", [
        ("mov100,0", MAX_VELOCITY, 0.0),
        ("mov-100,0", -MAX_VELOCITY, 0.0),
        ("mov0,99", 0.0, MAX_STEERING),
        ("mov0,-99", 0.0, -MAX_STEERING),
    ])
    def test_clamped(self, line, velocity, steering):
        assert parse_move(line) == MoveCommand(velocity, steering)

    def test_custom_limits(self):
        cmd = parse_move("mov100,100", max_velocity=2.0, max_steering=1.0)
        assert cmd == MoveCommand(2.0, 1.0)

    def test_total_classification_fuzz(self):
        # Every input lands in exactly one of: command, ignored, error.
        rng = random.Random(13)
        alphabet = "mov0123456789.,-+xe "
        for _ in range(2000):
            line = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            try:
                out = parse_move(line)
            except CommandError:
                continue
            assert out is None or isinstance(out, MoveCommand)
            if isinstance(out, MoveCommand):
                assert abs(out.ref_velocity) <= MAX_VELOCITY
                assert abs(out.ref_steering) <= MAX_STEERING


class TestFormatting:
    def test_echo_frozen(self):
        assert format_echo(MoveCommand(1.5, -0.5)) == "x1.50,-0.50"
        assert format_echo(MoveCommand(0.0, 0.0)) == "x0.00,0.00"

    def test_move_frozen(self):
        assert format_move(MoveCommand(1.5, -0.5)) == "mov1.50,-0.50"

    def test_echo_and_move_share_payload(self):
        cmd = MoveCommand(-3.25, 4.0)
        assert format_echo(cmd)[1:] == format_move(cmd)[3:]

    def test_round_trip_exhaustive_quarter_grid(self):
        # Every 2-decimal command on the clamp box at 0.25 spacing survives
        # format -> parse exactly.
        v = -MAX_VELOCITY
        while v <= MAX_VELOCITY:
            s = -MAX_STEERING
            while s <= MAX_STEERING:
                cmd = MoveCommand(v, s)
                assert parse_move(format_move(cmd)) == cmd
                s += 0.25
            v += 0.25

    def test_round_trip_random_two_decimal(self):
        rng = random.Random(29)
        for _ in range(500):
            cmd = MoveCommand(round(rng.uniform(-10, 10), 2), round(rng.uniform(-5, 5), 2))
            back = parse_move(format_move(cmd))
            assert back.ref_velocity == pytest.approx(cmd.ref_velocity, abs=5e-3)
            assert back.ref_steering == pytest.approx(cmd.ref_steering, abs=5e-3)


def random_frame(rng):
    return TelemetryFrame(
        time_us=rng.randint(0, 10**9),
        pitch=rng.uniform(-2, 2),
        target_angle=rng.uniform(-1, 1),
        velocity=rng.uniform(-20, 20),
        target_velocity=rng.uniform(-10, 10),
        steering=rng.uniform(-5, 5),
        accel=rng.uniform(-200, 200),
        is_balancing=rng.random() < 0.5,
        fallen=rng.random() < 0.5,
        pos_x=rng.uniform(-100, 100),
        pos_y=rng.uniform(-100, 100),
        heading=rng.uniform(-7, 7),
    )


class TestTelemetry:
    def test_zero_frame_round_trips(self):
        frame = TelemetryFrame(0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, False, False, 0.0, 0.0, 0.0)
        assert decode_telemetry(encode_telemetry(frame)) == frame

    def test_six_significant_digits_preserved(self):
        frame = TelemetryFrame(0, 0.0349066, 0.0, 0.0, 0.0, 0.0, 0.0,
                               True, False, 0.0, 0.0, 0.0)
        assert decode_telemetry(encode_telemetry(frame)).pitch == 0.0349066

    def test_encode_decode_encode_is_stable(self):
        rng = random.Random(31)
        for _ in range(200):
            text = encode_telemetry(random_frame(rng))
            assert encode_telemetry(decode_telemetry(text)) == text

    def test_round_trip_at_declared_precision(self):
        rng = random.Random(37)
        for _ in range(200):
            frame = random_frame(rng)
            back = decode_telemetry(encode_telemetry(frame))
            assert back.time_us == frame.time_us
            assert back.is_balancing == frame.is_balancing
            assert back.fallen == frame.fallen
            for name in ("pitch", "target_angle", "velocity", "target_velocity",
                         "steering", "accel", "pos_x", "pos_y", "heading"):
                a, b = getattr(frame, name), getattr(back, name)
                assert b == pytest.approx(a, rel=1e-5, abs=1e-9)

    def test_field_names_are_stable(self):
        frame = TelemetryFrame(12, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, True, False, 0.7, 0.8, 0.9)
        import json
        doc = json.loads(encode_telemetry(frame))
        assert list(doc) == [
            "timeUs", "pitch", "targetAngle", "velocity", "targetVelocity",
            "steering", "accel", "isBalancing", "fallen", "posX", "posY", "heading",
        ]

    @pytest.mark.parametrize("text", [
        "",
        "{",
        "[]",
        "42",
        '{"timeUs": 1}',
        '{"timeUs": 1, "pitch": "no"}',
    ])
    def test_malformed_rejected(self, text):
        with pytest.raises(CommandError):
            decode_telemetry(text)

    def test_missing_field_named_in_error(self):
        with pytest.raises(CommandError, match="pitch"):
            decode_telemetry('{"timeUs": 1}')
