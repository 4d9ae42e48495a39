"""FastAPI service exposing the emissions analyses over HTTP."""
import dataclasses
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from co2dist import config as cfg
from co2dist.errors import Co2DistError, ConvergenceError, InsufficientDataError, PanelLookupError
from co2dist.logic import fit, gibrat, ingest, normtest, policy, sanitizer, trend
from co2dist.logic.ingest import EmissionsPanel, cross_section

cfg.load_environment()
cfg.configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="CO2 Emissions Distribution Engine")

app.add_middleware(
    CORSMiddleware,
    allow_origins=[
        "http://localhost:8000",
        "http://localhost:8080",
        "http://127.0.0.1:8000",
        "http://127.0.0.1:8080",
    ],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _finite(value) -> Optional[float]:
    """JSON has no NaN or infinity; both become null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, PanelLookupError):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, Co2DistError):
        return HTTPException(status_code=400, detail=str(exc))
    logger.exception("Unexpected error")
    return HTTPException(status_code=500, detail=str(exc))


async def _read_panel(
    file: Optional[UploadFile], dataset: Optional[str], format: str, convert_carbon: bool
) -> EmissionsPanel:
    """The uploaded CSV, or `<dataset>.csv` from CO2DIST_DATA_DIR."""
    if file is not None:
        panel = ingest.load_panel_bytes(await file.read(), format=format)
    elif dataset:
        panel = ingest.load_panel(_dataset_path(dataset), format=format)
    else:
        raise HTTPException(status_code=400, detail="upload a CSV file or name a dataset")
    return ingest.convert_carbon_to_co2(panel) if convert_carbon else panel


def _dataset_path(key: str) -> Path:
    data_dir = cfg.env_data_dir()
    if key not in cfg.DATASET_KEYS or data_dir is None:
        raise PanelLookupError(f"dataset {key!r} is not available")
    path = data_dir / f"{key}.csv"
    if not path.exists():
        raise PanelLookupError(f"dataset {key!r} is not available")
    return path


def _years(panel: EmissionsPanel, spec: str) -> List[int]:
    try:
        bounds = sanitizer.parse_year_range(spec)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    if bounds is None:
        return list(panel.years)
    return [year for year in panel.years if bounds[0] <= year <= bounds[1]]


# Response models
class SummaryRow(BaseModel):
    year: int
    n: int
    max: float
    min: float
    mean: float
    sd: float
    skewness: Optional[float]
    kurtosis: Optional[float]


class SummaryResponse(BaseModel):
    success: bool
    rows: List[SummaryRow]


class RankedModel(BaseModel):
    model: str
    value: float
    delta: float
    group: str
    boundary: bool
    params: Dict[str, float]


class YearRanking(BaseModel):
    year: int
    criterion: str
    best: str
    criteria_agree: bool
    models: List[RankedModel]


class SkippedYear(BaseModel):
    year: int
    reason: str


class RankResponse(BaseModel):
    success: bool
    years: List[YearRanking]
    skipped: List[SkippedYear] = []


class YearTests(BaseModel):
    year: int
    n: int
    p_values: Dict[str, Optional[float]]
    colours: Dict[str, str]


class NormalityResponse(BaseModel):
    success: bool
    years: List[YearTests]


class GibratRow(BaseModel):
    period: str
    method: str
    alpha: float
    beta: float
    beta_formatted: str
    se_beta: float
    p_value: Optional[float]
    n: int


class GibratResponse(BaseModel):
    success: bool
    fits: List[GibratRow]


class TrendCoefficients(BaseModel):
    response: str
    alpha: float
    beta: float
    se_beta: float
    se_beta_hac: float
    hac_lag: int
    r_squared: float


class ForecastRow(BaseModel):
    year: int
    mu_t: float
    sigma_t: float
    R: Optional[float] = None


class TrendResponse(BaseModel):
    success: bool
    trends: List[TrendCoefficients]
    forecast: List[ForecastRow]


class AllocateRequest(BaseModel):
    base_emissions: List[float] = Field(min_length=1)
    reference_emissions: List[float] = Field(min_length=1)
    countries: Optional[List[str]] = None
    mu_t: float
    sigma_t: float = Field(gt=0)
    R_target: float = Field(gt=0)


class TargetRow(BaseModel):
    rank: int
    country: str
    reference_emissions: float
    allocated_emissions: float
    r_i: float
    group: str


class AllocateResponse(BaseModel):
    success: bool
    R: float
    theil: float
    targets: List[TargetRow]


class SolveRequest(BaseModel):
    free: str = Field(pattern="^(mu|sigma)$")
    fixed_value: float
    R_target: float = Field(gt=0)
    base_emissions: List[float] = Field(min_length=1)


class SolveResponse(BaseModel):
    success: bool
    free: str
    value: float
    mu_t: float
    sigma_t: float
    R_achieved: float


@app.get("/")
def root():
    return {"message": "CO2 Emissions Distribution Engine API"}


@app.get("/api/datasets")
def list_datasets():
    """Dataset keys with a CSV in CO2DIST_DATA_DIR."""
    data_dir = cfg.env_data_dir()
    if data_dir is None:
        return {"datasets": []}
    return {"datasets": [key for key in cfg.DATASET_KEYS if (data_dir / f"{key}.csv").exists()]}


@app.post("/api/panel/summary", response_model=SummaryResponse)
async def summarize_panel(
    file: Optional[UploadFile] = File(None),
    dataset: Optional[str] = Form(None),
    format: str = Form("long"),
    convert_carbon: bool = Form(False),
    years: str = Form(""),
):
    """Descriptive statistics per year."""
    try:
        panel = await _read_panel(file, dataset, format, convert_carbon)
        summaries = ingest.summarize_panel(panel, _years(panel, years))
        return SummaryResponse(success=True, rows=[SummaryRow(**s.as_row()) for s in summaries])
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/rank", response_model=RankResponse)
async def rank_models(
    file: Optional[UploadFile] = File(None),
    dataset: Optional[str] = Form(None),
    format: str = Form("long"),
    convert_carbon: bool = Form(False),
    years: str = Form(""),
    criterion: str = Form("aic"),
):
    """Six-model fits ranked by AIC, BIC or HQC for every year."""
    try:
        panel = await _read_panel(file, dataset, format, convert_carbon)
        if criterion not in fit.CRITERIA:
            raise HTTPException(status_code=400, detail=f"unknown criterion {criterion!r}")

        result = []
        skipped = []
        for year in _years(panel, years):
            _, values = cross_section(panel, year)
            try:
                fits = fit.fit_all(values)
                ranking = fit.rank_models(fits, criterion)
            except (InsufficientDataError, ConvergenceError) as exc:
                logger.warning("Skipping year %s: %s", year, exc)
                skipped.append(SkippedYear(year=year, reason=str(exc)))
                continue
            result.append(
                YearRanking(
                    year=year,
                    criterion=criterion,
                    best=ranking.best.value,
                    criteria_agree=fit.information_criteria_agree(fits),
                    models=[
                        RankedModel(
                            model=entry.model.value,
                            value=entry.value,
                            delta=entry.delta,
                            group=entry.group,
                            boundary=entry.boundary,
                            params=fits[entry.model].params.named(),
                        )
                        for entry in ranking.entries
                    ],
                )
            )
        return RankResponse(success=True, years=result, skipped=skipped)
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/test", response_model=NormalityResponse)
async def run_normality_tests(
    file: Optional[UploadFile] = File(None),
    dataset: Optional[str] = Form(None),
    format: str = Form("long"),
    convert_carbon: bool = Form(False),
    years: str = Form(""),
):
    """The seven normality tests on log emissions for every year."""
    try:
        panel = await _read_panel(file, dataset, format, convert_carbon)
        result = []
        for year in _years(panel, years):
            _, values = cross_section(panel, year)
            reports = normtest.test_all(values)
            result.append(
                YearTests(
                    year=year,
                    n=int(values.size),
                    p_values={r.test.value: _finite(r.p_value) for r in reports},
                    colours={r.test.value: normtest.colour_class(r.p_value) for r in reports},
                )
            )
        return NormalityResponse(success=True, years=result)
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/gibrat", response_model=GibratResponse)
async def run_gibrat_regressions(
    file: Optional[UploadFile] = File(None),
    dataset: Optional[str] = Form(None),
    format: str = Form("long"),
    convert_carbon: bool = Form(False),
    years: str = Form(""),
    robust: bool = Form(False),
):
    """M1-M4 regressions for consecutive years."""
    try:
        panel = await _read_panel(file, dataset, format, convert_carbon)
        rows = []
        for sample, fits in gibrat.consecutive_year_fits(panel, _years(panel, years), robust=robust):
            for result in fits:
                rows.append(
                    GibratRow(
                        period=sample.label,
                        method=result.method.value,
                        alpha=result.alpha,
                        beta=result.beta,
                        beta_formatted=gibrat.format_beta(result.method, result.beta),
                        se_beta=result.se_beta,
                        p_value=_finite(result.p_value),
                        n=result.n,
                    )
                )
        return GibratResponse(success=True, fits=rows)
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/trend", response_model=TrendResponse)
async def fit_trends(
    file: Optional[UploadFile] = File(None),
    dataset: Optional[str] = Form(None),
    format: str = Form("long"),
    convert_carbon: bool = Form(False),
    years: str = Form(""),
    hac_lag: Optional[int] = Form(None),
    forecast_years: str = Form("2025,2030,2035"),
    base_year: Optional[int] = Form(None),
):
    """mu and sigma trends with forecasts; R is included when base_year is given."""
    try:
        panel = await _read_panel(file, dataset, format, convert_carbon)
        try:
            targets = sanitizer.parse_int_list(forecast_years)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        series = trend.lognormal_parameter_series(panel, _years(panel, years))
        models = trend.fit_parameter_trends(series, hac_lag=hac_lag)
        base = cross_section(panel, base_year)[1] if base_year is not None else None
        forecast = trend.forecast_table(*models, targets, base)

        return TrendResponse(
            success=True,
            trends=[
                TrendCoefficients(
                    response=m.response,
                    alpha=m.alpha,
                    beta=m.beta,
                    se_beta=m.se_beta,
                    se_beta_hac=m.se_beta_hac,
                    hac_lag=m.hac_lag,
                    r_squared=m.r_squared,
                )
                for m in models
            ],
            forecast=[
                ForecastRow(
                    year=int(row["year"]),
                    mu_t=row["mu_t"],
                    sigma_t=row["sigma_t"],
                    R=_finite(row.get("R")),
                )
                for row in forecast.to_dict(orient="records")
            ],
        )
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/policy/allocate", response_model=AllocateResponse)
async def allocate_targets(request: AllocateRequest):
    """National ratios r_i for given base/reference vectors and target-year parameters."""
    try:
        n = len(request.reference_emissions)
        countries = request.countries or [f"C{i:03d}" for i in range(1, n + 1)]
        scenario = policy.PolicyScenario(
            base_year=0,
            reference_year=0,
            target_year=0,
            base_countries=tuple(f"B{i:03d}" for i in range(1, len(request.base_emissions) + 1)),
            base_emissions=request.base_emissions,
            reference_countries=tuple(countries),
            reference_emissions=request.reference_emissions,
            mu_t=request.mu_t,
            sigma_t=request.sigma_t,
            R_target=request.R_target,
        )
        targets = policy.allocate_targets(scenario)
        return AllocateResponse(
            success=True,
            R=policy.compute_R(request.mu_t, request.sigma_t, request.base_emissions),
            theil=policy.inequality_index(request.sigma_t),
            targets=[TargetRow(**dataclasses.asdict(t)) for t in targets],
        )
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


@app.post("/api/policy/solve", response_model=SolveResponse)
async def solve_parameter(request: SolveRequest):
    """The free parameter reaching R_target, with the other held fixed."""
    try:
        value = policy.solve_parameter(
            request.free, request.fixed_value, request.R_target, request.base_emissions
        )
        mu_t, sigma_t = (value, request.fixed_value) if request.free == "mu" else (request.fixed_value, value)
        return SolveResponse(
            success=True,
            free=request.free,
            value=value,
            mu_t=mu_t,
            sigma_t=sigma_t,
            R_achieved=policy.compute_R(mu_t, sigma_t, request.base_emissions),
        )
    except HTTPException:
        raise
    except Exception as e:
        raise _http_error(e)


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
