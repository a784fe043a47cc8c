"""Command-line interface: ``scs <command> ...``.

Exit codes: 0 success, 1 other errors (and a failed ``check``), 2 spec parse
errors, 3 infeasible constraint sets, 4 infeasible rates, 5 decode errors.
"""
from __future__ import annotations

import argparse
import math
import os
import random
import sys
from fractions import Fraction

from . import container as ct
from .block import block_decode, block_encode, block_rate, build_block_code, min_block_length, \
    verify_block_length
from .capacity import capacity_bounds, capacity_bruteforce, capacity_scs
from .constraints import ToleranceFn, is_admissible, is_fat, is_weakly_admissible, shrink
from .counting import AdmissibleCounter
from .errors import ScsError, SpecParseError
from .essential import containing_capacity, essential_graph, prefix_completion
from .sliding import build_sliding_encoder, build_window_system, encoder_decode, encoder_encode
from .specfile import Spec, parse_number, parse_spec, read_spec
from .words import pattern_from_index

DEFAULT_SEED = 0
RLL_SPEC = """\
# (0,1,0.205)-RLL: at most a 0.205 fraction of the windows are 11
alphabet: 0 1
k: 2
constraint: 11 <= 0.205
eps: 0.005
"""


# --- helpers -------------------------------------------------------------------

def _spec(path: str) -> Spec:
    try:
        return read_spec(path)
    except OSError as exc:
        raise ScsError(f"cannot read spec {path}: {exc.strerror}") from None


def _eps(args, spec: Spec | None, required: bool = True) -> Fraction | None:
    if getattr(args, "eps", None) is not None:
        return parse_number(args.eps)
    if spec is not None and spec.eps is not None:
        return spec.eps
    if required:
        raise ScsError("no epsilon given: use --eps or an 'eps:' line in the spec")
    return None


def _pick(name: str, args, spec: Spec | None, default=None):
    value = getattr(args, name, None)
    if value is None and spec is not None:
        value = getattr(spec, name)
    if value is None:
        value = default
    if value is None:
        raise ScsError(f"missing parameter {name}: pass --{name} or set it in the spec")
    return value


def _fmt(x: float) -> str:
    return "-inf" if x == -math.inf else f"{x:.6f}"


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        return
    with open(path, "wb") as fh:
        fh.write(data)


# --- commands --------------------------------------------------------------------

def cmd_capacity(args) -> int:
    spec = _spec(args.spec)
    gamma = spec.gamma
    if args.sweep:
        print("eps,capacity")
        for text in args.sweep.split(","):
            e = parse_number(text)
            print(f"{e},{_fmt(capacity_scs(shrink(gamma, e)).value)}")
        return 0
    if args.eps is not None:
        gamma = shrink(gamma, parse_number(args.eps))
    res = capacity_scs(gamma)
    if res.infeasible:
        print("error: the constraint set has no shift-invariant measure", file=sys.stderr)
        return 3
    print(f"{_fmt(res.value)} bits/symbol")
    if args.verbose:
        print(f"iterations: {res.iterations}")
        print(f"duality gap estimate: {res.duality_gap_estimate:.3e}")
        print(f"optimizer: {res.optimizer.format()}")
    if args.bounds:
        lo, hi = capacity_bounds(gamma)
        print(f"bounds: [{_fmt(lo)}, {_fmt(hi)}]")
    if args.bruteforce:
        print("n,log2|B_n|/n")
        for n, v in capacity_bruteforce(gamma, args.bruteforce):
            print(f"{n},{_fmt(v)}")
    return 0


def cmd_enumerate(args) -> int:
    spec = _spec(args.spec)
    gamma = spec.gamma
    eps = _eps(args, None, required=False)
    if eps is not None:
        gamma = shrink(gamma, eps)
    counter = AdmissibleCounter(gamma, args.n)
    if args.count:
        print(counter.count())
        return 0
    limit = args.limit if args.limit is not None else counter.count()
    for i, w in enumerate(counter.words()):
        if i >= limit:
            break
        print(gamma.alphabet.format(w) if w else "λ")
    return 0


def cmd_check(args) -> int:
    target = args.target
    stream = None
    if os.path.isfile(target):
        stream = ct.read_stream(_read_bytes(target))
    if args.spec:
        spec = _spec(args.spec)
    elif stream is not None and stream.spec_text:
        spec = parse_spec(stream.spec_text)
    else:
        raise ScsError("no constraint system: pass --spec")
    gamma = spec.gamma
    eps = _eps(args, None, required=False)
    if eps is not None:
        gamma = shrink(gamma, eps)
    if stream is None:
        word = gamma.alphabet.parse(target)
        ok = is_admissible(gamma, word)
        print("admissible" if ok else "not admissible")
        return 0 if ok else 1
    if stream.sigma != gamma.alphabet.size:
        raise ScsError(f"stream alphabet size {stream.sigma} does not match the spec")
    word = stream.symbols
    full = is_admissible(gamma, word)
    print(f"symbols: {len(word)}")
    if stream.mode == ct.MODE_SLIDING:
        m = _pick("m", args, spec)
        windows = build_window_system(spec.gamma, m)
        in_nm = windows.contains(word)
        weak = is_weakly_admissible(spec.gamma, word, ToleranceFn.window(gamma.k, m))
        print(f"all length-{m} windows allowed: {'yes' if in_nm else 'no'}")
        print(f"weakly admissible (tolerance S): {'yes' if weak else 'no'}")
        print("admissible" if full else "not admissible")
        return 0 if in_nm else 1
    print("admissible" if full else "not admissible")
    return 0 if full else 1


def _build_block(spec: Spec, args):
    eps = _eps(args, spec)
    m = _pick("m", args, spec)
    return build_block_code(spec.gamma, eps, m, override=getattr(args, "override", False))


def _build_sliding(spec: Spec, args):
    m, p, q = _pick("m", args, spec), _pick("p", args, spec), _pick("q", args, spec)
    return build_sliding_encoder(spec.gamma, m, p, q)


def _spec_for(spec: Spec, **fields) -> Spec:
    values = {k: getattr(spec, k) for k in ("eps", "m", "p", "q", "mode")}
    values.update({k: v for k, v in fields.items() if v is not None})
    return Spec(spec.gamma, **values)


def cmd_build_encoder(args) -> int:
    spec = _spec(args.spec)
    mode = _pick("mode", args, spec)
    if mode == "block":
        code = _build_block(spec, args)
        achieved, ceiling = block_rate(code)
        print(f"block code: m={code.m}, eps={code.eps}, |B_m|={code.size}, "
              f"bits/block={code.bits_per_block}, rate={achieved:.6f} (ceiling {ceiling:.6f})")
        if args.output:
            _write_bytes(args.output, ct.write_block_code(code))
        return 0
    E = _build_sliding(spec, args)
    print(f"sliding encoder: rate {E.p}:{E.q}, window m={E.m}, states={E.num_states}, "
          f"edges={E.num_edges}")
    print(f"anticipation={E.anticipation}, decoder memory={E.memory}, "
          f"lookahead={E.lookahead}, flush blocks={E.flush_blocks}")
    if args.output:
        text = _spec_for(spec, m=E.m, p=E.p, q=E.q, mode="sliding").format()
        _write_bytes(args.output, ct.write_encoder(E, text))
    return 0


def _load_coder(args, mode: str | None):
    """(mode, coder, spec) from --encoder/--code files or from --spec."""
    if args.code:
        code = ct.read_block_code(_read_bytes(args.code))
        return "block", code, Spec(code.gamma, code.eps, code.m, mode="block")
    if args.encoder:
        E, text = ct.read_encoder(_read_bytes(args.encoder))
        return "sliding", E, parse_spec(text)
    if not args.spec:
        raise ScsError("pass --spec, --code or --encoder")
    spec = _spec(args.spec)
    mode = mode or _pick("mode", args, spec)
    if mode == "block":
        return mode, _build_block(spec, args), spec
    return mode, _build_sliding(spec, args), spec


def cmd_encode(args) -> int:
    mode, coder, spec = _load_coder(args, args.mode)
    if args.mode and args.mode != mode:
        raise ScsError(f"--mode {args.mode} does not match the loaded {mode} coder")
    bits = ct.bytes_to_bits(_read_bytes(args.input))
    sigma = spec.gamma.alphabet.size
    if mode == "block":
        word = block_encode(coder, ct.frame_block_payload(bits, coder.bits_per_block))
        stream = ct.Stream(ct.MODE_BLOCK, sigma, word, len(bits), m=coder.m,
                           spec_text=_spec_for(spec, eps=coder.eps, m=coder.m,
                                               mode="block").format())
    else:
        padded = bits + [0] * (-len(bits) % coder.p)
        word = encoder_encode(coder, padded)
        stream = ct.Stream(ct.MODE_SLIDING, sigma, word, len(bits), p=coder.p, q=coder.q,
                           anticipation=coder.anticipation,
                           flush_symbols=coder.flush_blocks * coder.q if padded else 0,
                           spec_text=_spec_for(spec, m=coder.m, p=coder.p, q=coder.q,
                                               mode="sliding").format())
    _write_bytes(args.output, ct.write_stream(stream))
    return 0


def cmd_decode(args) -> int:
    stream = ct.read_stream(_read_bytes(args.input))
    if args.mode and args.mode != stream.mode_name:
        raise ScsError(f"stream is {stream.mode_name}-encoded, not {args.mode}")
    if not (args.spec or args.code or args.encoder):
        if not stream.spec_text:
            raise ScsError("stream carries no constraint description: pass --spec")
        spec = parse_spec(stream.spec_text)
        args.eps = args.eps if args.eps is not None else (str(spec.eps) if spec.eps else None)
        if stream.mode == ct.MODE_BLOCK:
            coder = _build_block(spec, args)
        else:
            coder = _build_sliding(spec, args)
    else:
        _, coder, spec = _load_coder(args, stream.mode_name)
    if stream.sigma != spec.gamma.alphabet.size:
        raise ct.DecodeError("stream alphabet size does not match the coder", offset=6)
    if stream.mode == ct.MODE_BLOCK:
        if stream.m != coder.m:
            raise ct.DecodeError(f"stream block length {stream.m} != coder's {coder.m}", offset=8)
        bits = ct.unframe_block_payload(block_decode(coder, stream.symbols))
    else:
        if (stream.p, stream.q) != (coder.p, coder.q):
            raise ct.DecodeError(f"stream rate {stream.p}:{stream.q} != coder's "
                                 f"{coder.p}:{coder.q}", offset=8)
        bits = encoder_decode(coder, stream.symbols)
    if len(bits) < stream.payload_bits:
        raise ct.DecodeError(f"decoded {len(bits)} bits, header announces {stream.payload_bits}",
                             offset=len(stream.symbols))
    bits = bits[: stream.payload_bits]
    if len(bits) % 8:
        raise ct.DecodeError("payload is not a whole number of bytes", offset=0)
    _write_bytes(args.output, ct.bits_to_bytes(bits))
    return 0


def cmd_ess_graph(args) -> int:
    spec = _spec(args.spec)
    ess = essential_graph(spec.gamma)
    G = ess.graph
    A = spec.gamma.alphabet
    print(f"vertices: {G.num_vertices}, edges: {len(G.edges)}, "
          f"components: {len(ess.components)}")
    for i, comp in enumerate(ess.components):
        names = " ".join(A.format(pattern_from_index(p, A.size, spec.k)) for p in comp.patterns)
        print(f"component {i}: {names}")
        print(f"  witness: {comp.witness.format()}")
    print(f"containing capacity: {_fmt(containing_capacity(spec.gamma, ess))} bits/symbol")
    if args.dot:
        text = ess.to_dot()
        if args.dot == "-":
            sys.stdout.write(text)
        else:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0


def cmd_complete_prefix(args) -> int:
    spec = _spec(args.spec)
    A = spec.gamma.alphabet
    alpha = A.parse(args.prefix)
    beta = prefix_completion(spec.gamma, alpha)
    print(A.format(beta) if beta else "λ")
    if args.verbose:
        ok = is_admissible(spec.gamma, alpha + beta)
        print(f"length {len(alpha) + len(beta)}, admissible: {'yes' if ok else 'no'}",
              file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    spec = _spec(args.spec) if args.spec else parse_spec(RLL_SPEC)
    gamma = spec.gamma
    eps = _eps(args, spec)
    k = gamma.k
    rng = random.Random(args.seed)
    out = []
    out.append("# Case study")
    out.append("")
    out.append("```")
    out.append(spec.format().rstrip())
    out.append("```")
    out.append("")
    fat = is_fat(gamma)
    out.append(f"fat: {'yes' if fat else 'no'} (margin {fat.margin})")
    cap = capacity_scs(gamma)
    out.append(f"capacity: {_fmt(cap.value)} bits/symbol")
    out.append("")
    out.append(f"## Block codes at eps = {eps}")
    shrunk = shrink(gamma, eps)
    for m in (5, 10):
        n = AdmissibleCounter(shrunk, m).count()
        out.append(f"|B_{m}(Gamma_eps)| = {n}")
    M = min_block_length(k, eps)
    out.append(f"sufficient block length: any m > {M}")
    failing = []
    hi = min(M, args.verify_to) if args.verify_to else M
    for m in range(args.verify_from, hi + 1):
        if not verify_block_length(gamma, eps, m):
            failing.append(m)
    if failing:
        worst = max(failing)
        rep = verify_block_length(gamma, eps, worst)
        out.append(f"largest failing m in [{args.verify_from}, {hi}]: {worst} "
                   f"(periodic limit {rep.limit} on "
                   f"'{gamma.constraints[rep.constraint].describe(gamma.alphabet, k)}', "
                   f"{rep.repetitions} repetitions of a {len(rep.cycle) * worst}-symbol cycle)")
        out.append(f"all m in [{worst + 1}, {hi}] pass the exact check")
    else:
        out.append(f"all m in [{args.verify_from}, {hi}] pass the exact check")
    target = Fraction(spec.p or 3, spec.q or 4)
    for m in (5, 10):
        code = build_block_code(gamma, eps, m, override=True)
        achieved, _ = block_rate(code)
        verdict = "meets" if achieved >= target else "misses"
        out.append(f"m={m}: {code.bits_per_block} bits/block, rate {achieved:.4f} "
                   f"({verdict} {target})")
    out.append("")
    sm, p, q = args.m, spec.p or 3, spec.q or 4
    out.append(f"## Sliding-block encoder, rate {p}:{q}, window m = {sm}")
    E = build_sliding_encoder(gamma, sm, p, q)
    st = E.stats
    out.append(f"window presentation: {st['presentation_vertices']} vertices, "
               f"capacity {st['presentation_capacity']:.6f}")
    out.append(f"encoder: {E.num_states} states, {E.num_edges} edges "
               f"({E.num_edges // E.num_states} per state), rate {E.rate}")
    out.append(f"anticipation {E.anticipation}; decoder window memory {E.memory}, "
               f"lookahead {E.lookahead}")
    payload = [rng.getrandbits(1) for _ in range(3000 - 3000 % p)]
    word = encoder_encode(E, payload)
    back = encoder_decode(E, word)
    ws = build_window_system(gamma, sm)
    out.append(f"sample: {len(payload)} bits -> {len(word)} symbols, round trip "
               f"{'ok' if back == payload else 'FAILED'}, windows allowed "
               f"{'yes' if ws.contains(word) else 'no'}")
    print("\n".join(out))
    return 0


# --- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scs", description="Semiconstrained coding toolkit.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for randomized steps (default %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity of a constraint system")
    p.add_argument("spec")
    p.add_argument("--eps", help="shrink by eps first")
    p.add_argument("--bounds", action="store_true", help="also print lower/upper bounds")
    p.add_argument("--bruteforce", type=int, metavar="N",
                   help="also print log2|B_n|/n for n up to N (CSV)")
    p.add_argument("--sweep", metavar="E1,E2,...", help="CSV of capacity against eps")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("enumerate", help="list or count admissible words")
    p.add_argument("spec")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--eps")
    p.add_argument("--count", action="store_true")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", help="check a word or an encoded stream")
    p.add_argument("target", help="a .scsw file or a literal word")
    p.add_argument("--spec")
    p.add_argument("--eps")
    p.add_argument("-m", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build-encoder", help="synthesize a block code or sliding encoder")
    p.add_argument("spec")
    p.add_argument("--mode", choices=("block", "sliding"))
    p.add_argument("-m", type=int)
    p.add_argument("--eps")
    p.add_argument("-p", type=int)
    p.add_argument("-q", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--override", action="store_true",
                   help="skip the block-length containment check")
    p.set_defaults(func=cmd_build_encoder)

    for name, func, helptext in (("encode", cmd_encode, "encode a file"),
                                 ("decode", cmd_decode, "decode a stream")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        p.add_argument("output")
        p.add_argument("--spec")
        p.add_argument("--code", help="block code file")
        p.add_argument("--encoder", help="sliding encoder file")
        p.add_argument("--mode", choices=("block", "sliding"))
        p.add_argument("-m", type=int)
        p.add_argument("--eps")
        p.add_argument("-p", type=int)
        p.add_argument("-q", type=int)
        p.add_argument("--override", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("ess-graph", help="essential graph and containing capacity")
    p.add_argument("spec")
    p.add_argument("--dot", metavar="FILE", help="write DOT ('-' for stdout)")
    p.set_defaults(func=cmd_ess_graph)

    p = sub.add_parser("complete-prefix", help="extend a prefix to an admissible word")
    p.add_argument("spec")
    p.add_argument("prefix")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_complete_prefix)

    p = sub.add_parser("report", help="block and sliding-block case study")
    p.add_argument("spec", nargs="?")
    p.add_argument("--eps")
    p.add_argument("-m", type=int, default=6, help="sliding-block window (default 6)")
    p.add_argument("--verify-from", type=int, default=150)
    p.add_argument("--verify-to", type=int)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ScsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
