"""HTTP service: the standard execution endpoints over the shadow backend.

The endpoint shell (routing, JSON parsing, request-schema validation,
artifact wire format) comes straight from the primary package; only the
adapter behind it is different. The native model check gate is off because
saving is an echo of the loaded bytes: there is nothing new to gate.
"""

from __future__ import annotations

import os

import click

from bimstack.exec_http import Executor, build_router
from bimstack.httpd import Service

from .shadow import ShadowAdapter

DEFAULT_PORT = 8704


def make_service(port: int = 0, session=None) -> Service:
    executor = Executor(ShadowAdapter(), session=session, schema_gate=False)
    return Service(build_router(executor), port=port)


@click.command()
@click.option("--port", type=int, default=None, help="listen port (env ALT_EXEC_PORT)")
def main(port: int | None) -> None:
    """Serve /create, /modify, and /query on the shadow backend."""
    port = port if port is not None else int(os.environ.get("ALT_EXEC_PORT", DEFAULT_PORT))
    service = make_service(port=port)
    click.echo(f"shadowexec listening on :{service.port}")
    service.serve_forever()


if __name__ == "__main__":
    main()
