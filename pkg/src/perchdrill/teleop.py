"""Bidirectional teleop bridge: streams telemetry as JSON lines over a
websocket and feeds validated operator commands into the simulation.

One asyncio task owns the simulation; sockets only enqueue commands and
read snapshots, so there is no shared mutable state across the boundary.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os

import websockets

from .commands import command_from_dict
from .mission import MissionSim
from .telemetry import TELEMETRY_PERIOD, record_from_sim

DEFAULT_PORT = int(os.environ.get("PERCHDRILL_PORT", "8765"))
log = logging.getLogger(__name__)


class TeleopServer:
    def __init__(self, sim: MissionSim, rate: float = 1.0):
        if rate <= 0:
            raise ValueError("real-time rate must be positive")
        self.sim = sim
        self.rate = rate
        self.clients: set = set()
        self.inbox: asyncio.Queue = asyncio.Queue()
        self._stop = asyncio.Event()

    async def handler(self, ws):
        self.clients.add(ws)
        try:
            async for raw in ws:
                try:
                    cmd = command_from_dict(json.loads(raw))
                except (ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
                    await ws.send(json.dumps({"error": f"bad command: {e}"}))
                    continue
                await self.inbox.put((ws, cmd))
        finally:
            self.clients.discard(ws)

    async def sim_loop(self):
        period = TELEMETRY_PERIOD
        dt = 0.001
        loop = asyncio.get_running_loop()
        next_wall = loop.time()
        while not self._stop.is_set():
            while not self.inbox.empty():
                ws, cmd = self.inbox.get_nowait()
                decision = self.sim.apply_command(cmd)
                if not decision.accepted:
                    try:
                        await ws.send(json.dumps({"rejected": type(cmd).__name__, "reason": decision.reason}))
                    except websockets.ConnectionClosed:
                        pass
            for _ in range(int(round(period / dt))):
                self.sim.tick(dt)
            frame = record_from_sim(self.sim).to_json()
            dead = []
            # snapshot: handlers add/remove clients while we await sends
            for ws in list(self.clients):
                try:
                    await ws.send(frame)
                except websockets.ConnectionClosed:
                    dead.append(ws)
            for ws in dead:
                self.clients.discard(ws)
            next_wall += period / self.rate
            delay = next_wall - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_wall = loop.time()  # fell behind; don't try to catch up
                await asyncio.sleep(0)  # still yield so the socket runs

    def stop(self):
        self._stop.set()

    async def serve(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        async with websockets.serve(self.handler, host, port):
            log.info("teleop bridge on ws://%s:%d (rate %.2fx)", host, port, self.rate)
            await self.sim_loop()


def serve_teleop(
    port: int = DEFAULT_PORT,
    params=None,
    seed=None,
    rate: float = 1.0,
    host="127.0.0.1",
    depth_goal: float = 0.03,
):
    sim = MissionSim(params=params, seed=seed, depth_goal=depth_goal)
    server = TeleopServer(sim, rate=rate)
    asyncio.run(server.serve(host=host, port=port))
