"""Run the procedural mock backend: ``python -m txt2vid.backend``."""

import argparse

from txt2vid.backend.server import serve_stdio, serve_tcp


def main() -> None:
    parser = argparse.ArgumentParser(description="procedural synthesis backend")
    parser.add_argument("--stdio", action="store_true", help="serve on stdin/stdout (default)")
    parser.add_argument("--tcp-port", type=int, help="serve on 127.0.0.1:PORT instead")
    args = parser.parse_args()
    if args.tcp_port:
        serve_tcp("127.0.0.1", args.tcp_port)
    else:
        serve_stdio()


if __name__ == "__main__":
    main()
