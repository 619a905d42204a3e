from http import HTTPStatus

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from dispersao.exceptions import DispersaoError
from dispersao.log import configure_logging
from dispersao.routers import lattice, oracle, system
from dispersao.settings import get_settings
from dispersao.utils import package_version

configure_logging(get_settings().LOG_LEVEL)

app = FastAPI(
    root_path='/api/v1',
    title='Dispersão TFIM',
    description=(
        'Consulta às séries de referência e à geometria da rede '
        '(sem rodar evoluções)'
    ),
    version=package_version(),
)

app.include_router(system.router)
app.include_router(oracle.router)
app.include_router(lattice.router)


@app.exception_handler(DispersaoError)
def dispersao_error_handler(request: Request, exc: DispersaoError):
    return JSONResponse(
        status_code=HTTPStatus.BAD_REQUEST, content={'detail': str(exc)}
    )


@app.exception_handler(RequestValidationError)
def validation_error_handler(request: Request, exc: RequestValidationError):
    return JSONResponse(
        status_code=HTTPStatus.BAD_REQUEST,
        content={'detail': str(exc.errors())},
    )


@app.get('/')
def read_root():
    return {'message': 'API de dispersão funcionando!'}
