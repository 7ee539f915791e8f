"""Network gateway binding the stack together."""

from txt2vid.gateway.config import GatewayConfig
from txt2vid.gateway.profiles import ProfileStore
from txt2vid.gateway.service import Gateway, run_gateway

__all__ = ["GatewayConfig", "ProfileStore", "Gateway", "run_gateway"]
