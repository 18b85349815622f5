"""FastAPI service exposing the library; the CLI calls the same handlers in-process."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import CapExceededError, DomainError
from . import handlers, schemas

app = FastAPI(title="randluroth", version="0.1.0")


def _guard(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (DomainError, ValueError, ZeroDivisionError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except CapExceededError as e:
        raise HTTPException(status_code=507, detail=str(e))


@app.post("/expand", response_model=schemas.ExpandResponse)
def expand(req: schemas.ExpandRequest):
    return _guard(handlers.handle_expand, req.c, req.x, req.omega, req.steps)


@app.post("/classify", response_model=schemas.ClassifyResponse,
          response_model_by_alias=True)
def classify(req: schemas.ClassifyRequest):
    return _guard(handlers.handle_classify, req.c, req.x, req.emit_graph,
                  req.max_count, req.max_period)


@app.post("/markov", response_model=schemas.MarkovResponse)
def markov(req: schemas.MarkovRequest):
    return _guard(handlers.handle_markov, req.c, req.cap)


@app.post("/density", response_model=schemas.DensityResponse)
def density(req: schemas.DensityRequest):
    return _guard(handlers.handle_density, req.c, req.p, req.eval_x)


@app.post("/lyapunov", response_model=schemas.StatReportModel)
def lyapunov(req: schemas.SimRequest):
    return _guard(handlers.handle_lyapunov, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.x0)


@app.post("/theta-stats", response_model=schemas.ThetaStatsResponse)
def theta_stats(req: schemas.ThetaStatsRequest):
    return _guard(handlers.handle_theta_stats, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.x0, req.grid)


@app.post("/freq", response_model=schemas.FreqResponse)
def freq(req: schemas.FreqRequest):
    return _guard(handlers.handle_freq, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.x0, req.max_digit)


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimRequest):
    return _guard(handlers.handle_simulate, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.x0)


@app.post("/convergence", response_model=schemas.StatReportModel)
def convergence(req: schemas.SimRequest):
    return _guard(handlers.handle_convergence, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.x0)


@app.post("/coverage", response_model=schemas.CoverageResponse)
def coverage(req: schemas.CoverageRequest):
    return _guard(handlers.handle_coverage, req.c, req.p, req.steps,
                  req.trajectories, req.seed, req.block_len, req.digit_cutoff,
                  req.x0)


@app.post("/hitting", response_model=schemas.HittingResponse)
def hitting(req: schemas.HittingRequest):
    return _guard(handlers.handle_hitting, req.c, req.p, req.trajectories,
                  req.seed, req.max_steps, req.x0)
