"""One-shot probe worker: handshake, read a single request line, respond, exit.

The harness spawns one of these per probe; crashes here surface as a missing
or malformed response on the client side, never in the harness process.
"""

import sys

from .protocol import ObservedInfluence, ProbeRequest, handshake_line


def main() -> int:
    sys.stdout.write(handshake_line() + "\n")
    sys.stdout.flush()
    line = sys.stdin.readline()
    if not line.strip():
        return 1
    try:
        request = ProbeRequest.from_line(line)
    except Exception as exc:
        response = ObservedInfluence((), (), "runtime_error", f"bad request: {exc}")
        sys.stdout.write(response.to_line() + "\n")
        return 1
    from .probe import probe
    response = probe(request.code, list(request.schema), request.seed)
    sys.stdout.write(response.to_line() + "\n")
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
