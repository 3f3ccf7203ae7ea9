"""Command-line front end.

Exit codes: 0 success, 1 protocol or configuration error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import string
import sys
from pathlib import Path

from . import certs
from .certs import CertType
from .crypto import default_provider
from .errors import ConfigError, InvalidInput, Malformed, UnknownReason, VanetError
from .messages import decode_wire, to_json
from .selftest import run_selftest
from .sim import SimConfig, canonical_config, run, run_comparison
from .world import CA_ID, CA_KEY_SEED

_HEX = set(string.hexdigits)


class CliError(Exception):
    """Reported on stderr with exit code 1."""


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _load_config(args) -> SimConfig:
    config = SimConfig.load(args.config) if args.config else canonical_config()
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seed=args.seed).validate()
    return config


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def cmd_run(args) -> int:
    config = _load_config(args)
    events, metrics = run(config)
    out = _out_dir(args.out)
    events.write(out / "events.jsonl")
    metrics.write_csv(out / "metrics.csv")
    iso = metrics.time_to_isolation
    print(f"mode={metrics.mode} events={len(events)} channel_bytes={metrics.channel_bytes_total} "
          f"revocation_bytes={metrics.revocation_bytes} time_to_isolation={'inf' if iso is None else iso}")
    print(f"wrote {out / 'events.jsonl'} and {out / 'metrics.csv'}")
    return 0


def cmd_compare(args) -> int:
    config = _load_config(args)
    comparison, al, crl = run_comparison(config, args.crl_size)
    out = _out_dir(args.out)
    (out / "comparison.csv").write_text(comparison.to_csv())
    al.write_csv(out / "metrics_al.csv")
    crl.write_csv(out / "metrics_crl.csv")
    print(comparison.report())
    return 0


def cmd_cert(args) -> int:
    provider = default_provider()
    ca = provider.generate_keypair(CA_KEY_SEED)
    subject = provider.generate_keypair(args.vehicle)
    cert = certs.issue(args.type, args.vehicle, ca, args.now, args.reason,
                       issuer_id=CA_ID, subject_key=subject.public_key, provider=provider)
    print(certs.dump(cert))
    return 0


def _parse_hex(text: str) -> bytes:
    cleaned = []
    for offset, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch not in _HEX:
            raise CliError(f"invalid hex character {ch!r} at offset {offset}")
        cleaned.append(ch)
    if len(cleaned) % 2:
        raise CliError(f"odd number of hex digits ({len(cleaned)})")
    return bytes.fromhex("".join(cleaned))


def _read_input(source: str) -> bytes:
    path = Path(source)
    if source != "-" and not path.is_file():
        return _parse_hex(source)
    raw = sys.stdin.buffer.read() if source == "-" else path.read_bytes()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        return raw
    if text.strip() and all(c in _HEX or c.isspace() for c in text):
        return _parse_hex(text)
    return raw


def cmd_decode(args) -> int:
    data = _read_input(args.input)
    try:
        if args.wire:
            print(json.dumps(to_json(decode_wire(data)), indent=2, sort_keys=True))
        else:
            print(certs.dump(certs.decode(data)))
    except Malformed as exc:
        where = f" (byte offset {exc.offset})" if exc.offset is not None else ""
        raise CliError(f"{exc}{where}") from None
    return 0


def cmd_selftest(args) -> int:
    checks = run_selftest()
    for check in checks:
        print(f"{'PASS' if check.ok else 'FAIL'} {check.name} {check.detail}".rstrip())
    failed = sum(not c.ok for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vanetcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("--config", help="scenario JSON (default: canonical scenario)")
    p.add_argument("--seed", type=_non_negative, help="override the scenario seed")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run adversary-list and CRL-baseline modes on the same traffic")
    p.add_argument("--config", help="scenario JSON (default: canonical scenario)")
    p.add_argument("--crl-size", type=_non_negative, default=100, help="baseline CRL entries (default 100)")
    p.add_argument("--seed", type=_non_negative, help="override the scenario seed")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cert", help="issue a certificate with the simulator CA key and dump it")
    p.add_argument("--type", required=True, choices=[t.label for t in CertType])
    p.add_argument("--vehicle", required=True, type=_non_negative)
    p.add_argument("--reason", type=int, help="revocation reason 1-4 (AC only)")
    p.add_argument("--now", type=_non_negative, default=0, help="issue time, seconds")
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("decode", help="dump a certificate (or wire message) given as hex or a file")
    p.add_argument("input", help="hex string, a file path, or - for stdin")
    p.add_argument("--wire", action="store_true", help="decode a wire message instead of a certificate")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("selftest", help="receive truth table and adversary-list replay check")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ConfigError, InvalidInput, UnknownReason, VanetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
