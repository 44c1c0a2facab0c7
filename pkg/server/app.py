"""
Model: N/A (transport).
Purpose: Flask app serving the lab's JSON API.
Dependencies: flask, server/routes/lab.py.
Ext Hooks: Register more blueprints in create_app().
"""

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from flask import Flask, jsonify

from server.routes.lab import bp as lab_bp


def create_app() -> Flask:
    app = Flask(__name__)
    app.register_blueprint(lab_bp)

    @app.route("/api/health", methods=["GET"])
    def handle_health():
        return jsonify({"status": "ok"})

    return app


if __name__ == "__main__":
    create_app().run(debug=True)
