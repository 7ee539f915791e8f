"""Entry point: ``txt2vid-adapter`` / ``python -m txt2vid_adapter``."""

import argparse

from txt2vid_adapter.config import AdapterConfig
from txt2vid_adapter.server import serve_stdio, serve_tcp


def main() -> None:
    parser = argparse.ArgumentParser(description="synthesis backend adapter")
    parser.add_argument("--config", help="JSON AdapterConfig file")
    parser.add_argument("--stdio", action="store_true", help="serve on stdin/stdout (default)")
    parser.add_argument("--tcp-port", type=int, help="serve on 127.0.0.1:PORT instead")
    args = parser.parse_args()
    config = AdapterConfig.from_file(args.config) if args.config else AdapterConfig()
    if args.tcp_port:
        serve_tcp("127.0.0.1", args.tcp_port, config)
    else:
        serve_stdio(config)


if __name__ == "__main__":
    main()
