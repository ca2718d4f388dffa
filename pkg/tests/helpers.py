"""Small hand-built sites for crawler tests."""

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class DictSite:
    """Tiny server: path -> (status, headers, body). Logs requested paths."""

    def __init__(self, routes):
        self.routes = routes
        self.requests = []
        site = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                site.requests.append(self.path)
                status, headers, body = site.routes.get(self.path, (404, {}, b""))
                self.send_response(status)
                for k, v in headers.items():
                    self.send_header(k, v)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=self.httpd.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True).start()
        self.origin = f"http://127.0.0.1:{self.httpd.server_address[1]}"

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


def html(*hrefs, title="t"):
    links = "".join(f'<a href="{h}">x</a>' for h in hrefs)
    return (200, {"Content-Type": "text/html"}, f"<title>{title}</title><body>{links}</body>".encode())


def redirect(to):
    return (302, {"Location": to}, b"")
