"""Command-line client for the rate-simulation service.

By default every command talks to an in-process instance of the HTTP app,
so no server needs to be running; pass ``--server URL`` to target a remote
instance instead.  Subcommands only build requests and format responses;
all computation happens behind the service endpoints.
"""

from __future__ import annotations

import math
import sys
import warnings

import click
import httpx
import yaml

from .service import create_app

LOW_POWER_TRIALS = 1_000


def _make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=3600.0)
    with warnings.catch_warnings():
        # this starlette release nags about its test client's httpx backend;
        # harmless for an in-process transport
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return TestClient(create_app(), raise_server_exceptions=False)


def _parse_bits_flag(value: str) -> int | str:
    token = value.strip().lower()
    if token in {"inf", "infinite"}:
        return "inf"
    try:
        bits = int(token)
    except ValueError:
        raise click.BadParameter(f"--bits must be a positive integer or 'inf', got {value!r}")
    if bits < 1:
        raise click.BadParameter(f"--bits must be a positive integer or 'inf', got {value!r}")
    return bits


def _fail(response: httpx.Response) -> None:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    if isinstance(detail, list):
        detail = "; ".join(
            str(entry.get("msg", entry)) if isinstance(entry, dict) else str(entry)
            for entry in detail
        )
    click.echo(f"error ({response.status_code}): {detail}", err=True)
    sys.exit(1 if response.status_code >= 500 else 2)


def _request(ctx, method: str, url: str, **kwargs) -> httpx.Response:
    with _make_client(ctx.obj.get("server")) as client:
        response = client.request(method, url, **kwargs)
    if response.status_code >= 400:
        _fail(response)
    return response


@click.group()
@click.option("--server", default=None, metavar="URL", help="Remote service URL (default: run in-process).")
@click.pass_context
def cli(ctx, server):
    """Quantized massive-MIMO uplink rate toolbox."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@cli.command("rho")
@click.option("--bits", required=True, help="ADC bit depth (positive integer or 'inf').")
@click.option("--mode", type=click.Choice(["table", "lloyd-max"]), default="table", show_default=True)
@click.option("--levels", "show_levels", is_flag=True, help="Also print quantizer levels (lloyd-max only).")
@click.option("--csv", "as_csv", is_flag=True, help="Machine-readable output.")
@click.pass_context
def cmd_rho(ctx, bits, mode, show_levels, as_csv):
    """Distortion rho and gain alpha for a given ADC bit depth."""
    parsed = _parse_bits_flag(bits)
    if show_levels and mode == "lloyd-max" and parsed != "inf":
        resp = _request(ctx, "POST", "/quantizer/design", json={"bits": parsed})
        data = resp.json()
    else:
        resp = _request(ctx, "GET", "/quantizer/rho", params={"bits": parsed, "mode": mode})
        data = resp.json()
    if as_csv:
        click.echo("bits,rho,alpha")
        click.echo(f"{data['bits']},{data['rho']!r},{data['alpha']!r}")
    else:
        click.echo(f"bits={data['bits']} rho={data['rho']:.6g} alpha={data['alpha']:.6g}")
        if show_levels and "levels" in data:
            click.echo("levels: " + " ".join(f"{v:.6g}" for v in data["levels"]))


@cli.command("rate")
@click.option("--m", "m_antennas", type=int, required=True, help="Number of BS antennas.")
@click.option("--n", "n_users", type=int, required=True, help="Number of users.")
@click.option("--bits", required=True, help="ADC bit depth (positive integer or 'inf').")
@click.option("--pu-db", type=float, default=None, help="Per-user transmit power in dB (10 dB if neither power flag is given).")
@click.option("--pu-linear", type=float, default=None, help="Per-user transmit power, linear.")
@click.option("--betas", default=None, help="Comma-separated large-scale attenuations (length N).")
@click.option("--mode", type=click.Choice(["table", "lloyd-max"]), default="table", show_default=True)
@click.option("--seed", type=int, default=2001, show_default=True, help="Fading seed.")
@click.option("--drop-seed", type=int, default=1006, show_default=True)
@click.option("--trials", type=int, default=10_000, show_default=True)
@click.option("--csv", "as_csv", is_flag=True)
@click.pass_context
def cmd_rate(ctx, m_antennas, n_users, bits, pu_db, pu_linear, betas, mode, seed, drop_seed, trials, as_csv):
    """Monte Carlo and closed-form rates at a single operating point."""
    body = {
        "m_antennas": m_antennas,
        "n_users": n_users,
        "bits": _parse_bits_flag(bits),
        "mode": mode,
        "seed": seed,
        "drop_seed": drop_seed,
        "trials": trials,
    }
    if pu_db is None and pu_linear is None:
        body["pu_db"] = 10.0
    if pu_db is not None:
        body["pu_db"] = pu_db
    if pu_linear is not None:
        body["pu_linear"] = pu_linear
    if betas is not None:
        try:
            body["betas"] = [float(tok) for tok in betas.split(",") if tok.strip()]
        except ValueError:
            raise click.BadParameter(f"--betas must be a comma-separated float list, got {betas!r}")
    data = _request(ctx, "POST", "/rate", json=body).json()
    if as_csv:
        click.echo("user,mc_mean,mc_stderr,approx")
        for entry in data["per_user"]:
            mc = entry["mc"]
            click.echo(f"{entry['user']},{mc['mean']!r},{mc['stderr']!r},{entry['approx']!r}")
        total = data["sum_rate_mc"]
        click.echo(f"sum,{total['mean']!r},{total['stderr']!r},{data['sum_rate_approx']!r}")
    else:
        click.echo(
            f"M={data['m_antennas']} N={data['n_users']} bits={data['bits']} "
            f"alpha={data['alpha']:.6g} p_u={data['p_u_linear']:.6g} trials={trials}"
        )
        for entry in data["per_user"]:
            mc = entry["mc"]
            click.echo(
                f"user {entry['user']}: mc {mc['mean']:.4f} +/- {mc['stderr']:.4f}"
                f"  approx {entry['approx']:.4f}"
            )
        total = data["sum_rate_mc"]
        click.echo(
            f"sum: mc {total['mean']:.4f} +/- {total['stderr']:.4f}"
            f"  approx {data['sum_rate_approx']:.4f}"
        )


def _write_table_csv(ctx, url: str, body: dict, out_path: str, label: str) -> None:
    resp = _request(ctx, "POST", url, json=body, params={"format": "csv"})
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(resp.text)
    n_rows = max(len(resp.text.strip().splitlines()) - 1, 0)
    click.echo(f"{label}: wrote {n_rows} rows to {out_path}")


@cli.command("figure")
@click.option("--id", "figure_id", type=click.Choice(["1", "2", "3"]), required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--trials", type=int, default=None, help="Override Monte Carlo trials per grid point.")
@click.option("--pu-db", type=float, default=None, help="Override fixed transmit power in dB.")
@click.option("--eu-db", type=float, default=None, help="Override scaled-power budget in dB.")
@click.option("--drop-seed", type=int, default=None)
@click.option("--seed", "fading_seed", type=int, default=None, help="Override fading seed.")
@click.option("--drops", type=int, default=None, help="Average over this many user drops.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker threads for grid points.")
@click.pass_context
def cmd_figure(ctx, figure_id, out_path, trials, pu_db, eu_db, drop_seed, fading_seed, drops, jobs):
    """Run a preset experiment and write its data table as CSV."""
    body = {"jobs": jobs}
    overrides = {
        "trials": trials,
        "pu_db": pu_db,
        "eu_db": eu_db,
        "drop_seed": drop_seed,
        "fading_seed": fading_seed,
        "drops": drops,
    }
    body.update({key: value for key, value in overrides.items() if value is not None})
    _write_table_csv(ctx, f"/figures/{figure_id}", body, out_path, f"figure {figure_id}")


@cli.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--jobs", type=int, default=1, show_default=True)
@click.pass_context
def cmd_sweep(ctx, config_path, out_path, jobs):
    """Run the grid described by a YAML scenario file."""
    with open(config_path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    if not isinstance(data, dict):
        raise click.BadParameter(f"config file {config_path} must contain a key-value mapping")
    if isinstance(data.get("bits_values"), list):
        # strict JSON has no Infinity literal; the service accepts the "inf" token
        data["bits_values"] = [
            "inf" if isinstance(b, float) and math.isinf(b) else b
            for b in data["bits_values"]
        ]
    _write_table_csv(ctx, "/sweep", {"config": data, "jobs": jobs}, out_path, "sweep")


@cli.command("validate")
@click.option("--trials", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.pass_context
def cmd_validate(ctx, trials, seed):
    """Run the statistical self-check suite; nonzero exit if any check fails."""
    if trials < LOW_POWER_TRIALS:
        click.echo(
            f"warning: {trials} trials give low statistical power; "
            f"z-scores are noisy below {LOW_POWER_TRIALS}",
            err=True,
        )
    data = _request(ctx, "POST", "/validate", json={"trials": trials, "seed": seed}).json()
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        if check["zscore"] is not None:
            detail = f"z={check['zscore']:+.2f}"
        else:
            detail = f"|err|={abs(check['estimate'] - check['expected']):.3g} bound={check['bound']:.3g}"
        click.echo(f"{status} {check['name']}: {check['estimate']:.6g} vs {check['expected']:.6g} ({detail})")
    if not data["all_passed"]:
        sys.exit(1)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
