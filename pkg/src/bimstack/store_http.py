"""HTTP service exposing the versioned object store.

Signed object access:
    GET  /bucket/{bucket}/{key}?versionId=&X-Expires=&X-Sig=
    POST /bucket/{bucket}/{key}?X-Expires=&X-Sig=        (body = raw bytes)

Unsigned:
    GET  /bucket/{bucket}/{key}/versions                 (version listing)
    POST /bucket/presign                                 (mint a grant)
    GET  /viewer/download?bucket=&key=&versionId=
    POST /viewer/upload?bucket=&key=

Keys may contain slashes; a key literally ending in "/versions" is not
supported over HTTP (the listing route shadows it).
"""

from __future__ import annotations

import os

import click

from .httpd import Request, Response, Router, Service, json_error
from .store import BadGrant, NotFound, ObjectStore, StoreError
import json as _json

DEFAULT_PORT = 8702


def build_router(store: ObjectStore) -> Router:
    router = Router()

    def presign(req: Request, m) -> Response:
        try:
            body = _json.loads(req.body or b"{}")
        except ValueError:
            return json_error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return json_error(400, "body must be a JSON object")
        for name in ("method", "bucket", "key"):
            if not isinstance(body.get(name), str) or not body.get(name):
                return json_error(400, f"missing field {name}")
        try:
            url = store.presign(
                method=body["method"],
                bucket=body["bucket"],
                key=body["key"],
                version_id=body.get("versionId"),
                ttl_sec=int(body.get("ttlSec", 300)),
            )
        except NotFound as exc:
            return json_error(404, str(exc))
        except (StoreError, ValueError, TypeError) as exc:
            return json_error(400, str(exc))
        return Response(200, {"url": url})

    def list_versions(req: Request, m) -> Response:
        bucket, key = m.group(1), m.group(2)
        try:
            versions = store.list_versions(bucket, key)
        except NotFound as exc:
            return json_error(404, str(exc))
        return Response(200, {"versions": [v.to_json() for v in versions]})

    def _check_grant(req: Request, method: str, bucket: str, key: str, version_id: str) -> Response | None:
        try:
            store.verify_grant(
                method=method,
                bucket=bucket,
                key=key,
                version_id=version_id,
                expires_at=req.query.get("X-Expires", ""),
                sig=req.query.get("X-Sig", ""),
            )
        except BadGrant as exc:
            return json_error(403, str(exc))
        return None

    def download(req: Request, m) -> Response:
        bucket, key = m.group(1), m.group(2)
        version_id = req.query.get("versionId", "")
        denied = _check_grant(req, "GET", bucket, key, version_id)
        if denied is not None:
            return denied
        try:
            served = store.stat(bucket, key, version_id or None)
            data = store.get_object(bucket, key, served.version_id)
        except NotFound as exc:
            return json_error(404, str(exc))
        return Response(200, data, headers={"X-Version-Id": served.version_id})

    def upload(req: Request, m) -> Response:
        bucket, key = m.group(1), m.group(2)
        denied = _check_grant(req, "POST", bucket, key, "")
        if denied is not None:
            return denied
        try:
            version = store.put_object(bucket, key, req.body)
        except NotFound as exc:
            return json_error(404, str(exc))
        except StoreError as exc:
            return json_error(400, str(exc))
        return Response(200, version.to_json())

    def viewer_download(req: Request, m) -> Response:
        bucket = req.query.get("bucket", "")
        key = req.query.get("key", "")
        if not bucket or not key:
            return json_error(400, "bucket and key query parameters are required")
        try:
            served = store.stat(bucket, key, req.query.get("versionId") or None)
            data = store.get_object(bucket, key, served.version_id)
        except NotFound as exc:
            return json_error(404, str(exc))
        return Response(200, data, headers={"X-Version-Id": served.version_id})

    def viewer_upload(req: Request, m) -> Response:
        bucket = req.query.get("bucket", "")
        key = req.query.get("key", "")
        if not bucket or not key:
            return json_error(400, "bucket and key query parameters are required")
        try:
            version = store.put_object(bucket, key, req.body)
        except NotFound as exc:
            return json_error(404, str(exc))
        except StoreError as exc:
            return json_error(400, str(exc))
        return Response(200, version.to_json())

    router.add("POST", r"/bucket/presign", presign)
    router.add("GET", r"/bucket/([^/]+)/(.+)/versions", list_versions)
    router.add("GET", r"/bucket/([^/]+)/(.+)", download)
    router.add("POST", r"/bucket/([^/]+)/(.+)", upload)
    router.add("GET", r"/viewer/download", viewer_download)
    router.add("POST", r"/viewer/upload", viewer_upload)
    return router


def make_service(store: ObjectStore, port: int = 0) -> Service:
    return Service(build_router(store), port=port)


@click.command()
@click.option("--root", default=None, help="Storage directory (default: env STORE_ROOT or ./store-data).")
@click.option("--secret", default=None, help="Signing secret (default: env STORE_SECRET).")
@click.option("--port", default=None, type=int, help="Listen port (default: env STORE_PORT or 8702).")
def main(root: str | None, secret: str | None, port: int | None) -> None:
    """Run the object store service."""
    root = root or os.environ.get("STORE_ROOT") or "./store-data"
    secret = secret or os.environ.get("STORE_SECRET")
    if not secret:
        raise click.UsageError("a signing secret is required (--secret or STORE_SECRET)")
    port = port if port is not None else int(os.environ.get("STORE_PORT") or DEFAULT_PORT)
    store = ObjectStore(root, secret.encode("utf-8"))
    service = make_service(store, port=port)
    click.echo(f"object store listening on :{service.port}, root {root}")
    service.serve_forever()


if __name__ == "__main__":
    main()
