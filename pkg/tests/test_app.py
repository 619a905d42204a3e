from http import HTTPStatus

import pytest

PARA = 'paramagnetic'


def test_root_deve_retornar_ok(client):
    response = client.get('/')
    assert response.status_code == HTTPStatus.OK
    assert response.json() == {'message': 'API de dispersão funcionando!'}


def test_health(client):
    response = client.get('/system/health')
    assert response.status_code == HTTPStatus.OK
    assert response.json()['status'] == 'ok'


def test_oracle_delta(client):
    response = client.get(
        '/oracle/delta',
        params={'k': 'X', 'phase': 'paramagnetic', 'coupling': 0.1},
    )
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body['delta'] == pytest.approx(2.02015, abs=5e-5)
    assert body['valid'] is True
    assert body['order'] == 4  # noqa: PLR2004
    assert body['k']['label'] == 'X'


def test_oracle_delta_accepts_explicit_dimensionality(client):
    response = client.get(
        '/oracle/delta',
        params={
            'k': 'X',
            'phase': PARA,
            'coupling': 0.1,
            'dimensionality': 2,
        },
    )
    assert response.status_code == HTTPStatus.OK
    assert response.json()['dimensionality'] == 2  # noqa: PLR2004
    assert response.json()['delta'] == pytest.approx(2.02015, abs=5e-5)


def test_oracle_path_3d(client):
    response = client.get(
        '/oracle/path',
        params={
            'phase': 'ferromagnetic',
            'coupling': 1.0,
            'dimensionality': '3',
            'samples': 3,
        },
    )
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert [v['label'] for v in body['vertices']] == [
        'G', 'X', 'M', 'R', 'G',
    ]
    assert len(body['points']) == 1 + 4 * 2
    assert body['points'][0]['delta'] == pytest.approx(11.6703703704)


def test_oracle_delta_3d_ferro(client):
    response = client.get(
        '/oracle/delta',
        params={
            'k': 'pi,pi,pi',
            'phase': 'ferromagnetic',
            'coupling': 1.0,
            'dimensionality': 3,
        },
    )
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body['delta'] == pytest.approx(12.1651620370, rel=1e-8)
    assert body['k']['label'] == 'R'


def test_oracle_path(client):
    response = client.get(
        '/oracle/path',
        params={'phase': 'ferromagnetic', 'coupling': 1.0, 'samples': 4},
    )
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert [v['label'] for v in body['vertices']] == [
        'X', 'M', 'S', 'G', 'X', 'S',
    ]
    assert len(body['points']) == 1 + 3 * 5
    assert body['points'][0]['delta'] == pytest.approx(7.7729571307)


def test_lattice_grid(client):
    response = client.get('/lattice/grid', params={'dims': '2,2'})
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body['dims'] == [2, 2]
    labels = {m['label'] for m in body['momenta']}
    assert labels == {'G', 'X', 'M', None}
    assert len(body['momenta']) == 4  # noqa: PLR2004


@pytest.mark.parametrize(
    ('url', 'params'),
    [
        ('/oracle/delta', {'k': 'R', 'phase': PARA, 'coupling': 1}),
        ('/oracle/delta', {'k': 'X', 'phase': PARA, 'coupling': -1}),
        ('/oracle/delta', {'k': 'X', 'phase': 'anti', 'coupling': 1}),
        ('/oracle/path', {'phase': PARA, 'coupling': 1, 'samples': 1}),
        (
            '/oracle/delta',
            {'k': 'X', 'phase': PARA, 'coupling': 1, 'dimensionality': 4},
        ),
        ('/lattice/grid', {'dims': '2,x'}),
        ('/lattice/grid', {'dims': '2'}),
        ('/lattice/grid', {'dims': '128,2'}),
    ],
)
def test_bad_requests(client, url, params):
    response = client.get(url, params=params)
    assert response.status_code == HTTPStatus.BAD_REQUEST
    assert 'detail' in response.json()
