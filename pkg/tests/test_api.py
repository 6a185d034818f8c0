import io

import openpyxl


class TestHealth:
    def test_health(self, client):
        response = client.get('/health')
        assert response.status_code == 200
        assert response.get_json()['database'] == 'connected'

    def test_unknown_route(self, client):
        response = client.get('/api/nothing')
        assert response.status_code == 404
        assert response.get_json()['success'] is False


class TestMatrixRoutes:
    def test_wm(self, client):
        data = client.get('/api/wm', query_string={'code': '1 2 2 1'}).get_json()
        assert data['success']
        assert data['code'] == '1 2 2 1'
        assert data['matrix']['rows'][0] == [2, 1, 0, 1]
        assert data['matrix']['labels'] == [0, 1, 2, 3]

    def test_wm_text(self, client):
        response = client.get('/api/wm', query_string={'code': '1 1', 'format': 'text'})
        assert response.mimetype == 'text/plain'
        assert response.get_data(as_text=True) == "0: 1 0\n1: 0 1\n"

    def test_wmbar(self, client):
        data = client.get('/api/wmbar', query_string={'code': '1 2 3 1 2 3', 'assignment': '5'}).get_json()
        assert data['assignment'] == 5
        assert data['diagram'] == 'O1 U2 O3 U1 O2 U3'
        assert 5 not in data['matrix']['labels']

    def test_ou(self, client):
        assert client.get('/api/ou', query_string={'code': '1 1'}).get_json()['matrix']['rows'] == [[-1, 1], [1, -1]]

    def test_incidence(self, client):
        data = client.get('/api/incidence', query_string={'code': 'O1 O2 U2 U1'}).get_json()
        assert data['matrix']['rows'] == [[0, 1, 1, 1], [0, 0, 1, 0]]

    def test_sequence(self, client):
        data = client.get('/api/sequence', query_string={'code': 'O1 U2 O3 U1 O2 U3'}).get_json()
        assert data['sequence'] == [1, 2, 1, 2, 1, 2]
        assert data['assignment'] == 5

    def test_pairs(self, client):
        assert client.get('/api/pairs', query_string={'code': '1 2 2 1'}).get_json()['pairs'] == [[1, 4], [2, 3]]

    def test_gauss_from_incidence(self, client):
        data = client.get('/api/gauss', query_string={'code': 'O1 O2 U2 U1', 'source': 'incidence'}).get_json()
        assert data == {'success': True, 'source': 'incidence', 'size': 4, 'pairs': [[1, 4], [2, 3]]}

    def test_canon(self, client):
        first = client.post('/api/canon', json={'rows': [[0, 1], [1, 0]]}).get_json()
        second = client.post('/api/canon', json={'rows': [[1, 0], [0, 1]]}).get_json()
        assert first['matrix']['rows'] == second['matrix']['rows']

    def test_rank_code(self, client):
        assert client.post('/api/rank', json={'code': '1 2 3 1 2 3'}).get_json()['rank'] == 4
        assert client.post('/api/rank', json={'code': 'O1 U2 O3 U1 O2 U3'}).get_json()['rank'] == 4

    def test_rank_rows(self, client):
        assert client.post('/api/rank', json={'rows': [[1, 1], [2, 2]]}).get_json()['rank'] == 1


class TestErrors:
    def test_missing_code(self, client):
        response = client.get('/api/wm')
        assert response.status_code == 400
        assert response.get_json()['error_code'] == 'InputError'

    def test_label_not_twice(self, client):
        response = client.get('/api/wm', query_string={'code': '1 2 1'})
        assert response.status_code == 400
        assert response.get_json()['error'] == 'label 2 appears 1 time(s)'

    def test_bad_assignment(self, client):
        response = client.get('/api/wmbar', query_string={'code': '1 1', 'assignment': 'abc'})
        assert response.status_code == 400

    def test_limit(self, client, monkeypatch):
        monkeypatch.setenv('WARPMATRIX_MATERIALIZE_LIMIT', '2')
        response = client.get('/api/wm', query_string={'code': '1 2 3 1 2 3'})
        assert response.status_code == 413
        assert response.get_json()['error_code'] == 'TooManyCrossings'

    def test_malformed_matrix(self, client):
        response = client.post('/api/rank', json={'rows': [[1, 2], [3]]})
        assert response.status_code == 422

    def test_entry_beyond_int64(self, client):
        response = client.post('/api/rank', json={'rows': [[99999999999999999999, 1], [1, 1]]})
        assert response.status_code == 422
        assert response.get_json()['error_code'] == 'MalformedSource'
        assert client.post('/api/canon', json={'rows': [[2 ** 64]]}).status_code == 422

    def test_non_integer_entry(self, client):
        response = client.post('/api/rank', json={'rows': [[1.5, 2]]})
        assert response.status_code == 400
        assert response.get_json()['error_code'] == 'UnreadableMatrix'

    def test_unknown_format(self, client):
        assert client.get('/api/wm', query_string={'code': '1 1', 'format': 'xml'}).status_code == 400


class TestExport:
    def test_csv(self, client):
        response = client.get('/api/export/wm', query_string={'code': '1 2 2 1', 'format': 'csv'})
        assert response.status_code == 200
        assert response.mimetype == 'text/csv'
        assert 'attachment; filename=wm-c2-' in response.headers['Content-Disposition']
        assert response.get_data(as_text=True).splitlines()[0] == 'label,b1,b2,b3,b4'

    def test_xlsx(self, client):
        response = client.get('/api/export/ou', query_string={'code': '1 1', 'format': 'xlsx'})
        assert response.status_code == 200
        assert response.headers['Content-Disposition'].endswith('.xlsx')
        workbook = openpyxl.load_workbook(io.BytesIO(response.data))
        rows = list(workbook.active.iter_rows(values_only=True))
        assert rows == [('label', 'b1', 'b2'), (0, -1, 1), (1, 1, -1)]

    def test_json(self, client):
        data = client.get('/api/export/incidence', query_string={'code': 'O1 O2 U2 U1'}).get_json()
        assert data['kind'] == 'incidence'
        assert data['instance'] == 'O1 O2 U2 U1'
        assert 'exported_at' in data

    def test_unknown_kind(self, client):
        assert client.get('/api/export/abc', query_string={'code': '1 1'}).status_code == 400

    def test_unknown_format(self, client):
        assert client.get('/api/export/wm', query_string={'code': '1 1', 'format': 'pdf'}).status_code == 400


class TestVerifyRoutes:
    def test_run_and_list(self, client):
        response = client.post('/api/verify', json={'scope': 'corpus', 'lemmaTrials': 5})
        data = response.get_json()
        assert response.status_code == 200
        assert data['summary']['success']
        assert data['reports'] == []
        assert data['run']['status'] == 'success'

        runs = client.get('/api/verify/runs').get_json()
        assert runs['count'] == 1
        assert runs['runs'][0]['scope'] == 'corpus'
        assert runs['runs'][0]['failedClaims'] == []

    def test_include_reports(self, client):
        data = client.post('/api/verify', json={
            'scope': 'exhaustive', 'maxCrossings': 1, 'lemmaTrials': 0, 'includeReports': True,
        }).get_json()
        assert len(data['reports']) == data['summary']['total'] == 10 + 2 * 7

    def test_bad_scope(self, client):
        assert client.post('/api/verify', json={'scope': 'galaxy'}).status_code == 400
        assert client.post('/api/verify', json={'n': 'ten'}).status_code == 400

    def test_bad_limit(self, client):
        assert client.get('/api/verify/runs', query_string={'limit': 'x'}).status_code == 400
