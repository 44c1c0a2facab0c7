# Blueprints registered by server/app.py
